//! Exact 1D reference: the bridge drift from the eigendecomposition of
//! `H = −D∂² + Dβ²V(x)` on a Dirichlet grid.
//!
//! With `K(x, x_f; s) = Σ ψₙ(x)ψₙ(x_f)e^{−sEₙ}` the transition density is
//! `P(x_f, t_f | x, t) = e^{−β(U(x_f) − U(x))/2} K(x, x_f; t_f − t)`, and the
//! conditioned drift `−U′/γ + 2D∂ₓ ln P` collapses to `2D ∂ₓK/K`.

mod model;

use model::build_model_for;
pub use model::{build_model, spectrum, SpectralConfig, SpectralModel, DOMAIN_MARGIN};

use crate::error::{BridgeError, Result};
use crate::potentials::PotentialSurface;
use crate::trajectory::{BridgeProblem, NoisePath, Trajectory};

/// Modes with `s·(Eₙ − E₀)` above this are dropped (`e^{−36.84} ≈ 1e-16`).
const MODE_CUTOFF: f64 = 36.841_361_487_904_734;

/// 4-point Lagrange weights on nodes −1, 0, 1, 2 for offset `u ∈ [0, 1)`.
#[inline]
fn cubic_weights(u: f64) -> [f64; 4] {
    [
        -u * (u - 1.0) * (u - 2.0) / 6.0,
        (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
        -(u + 1.0) * u * (u - 2.0) / 2.0,
        (u + 1.0) * u * (u - 1.0) / 6.0,
    ]
}

/// Propagator rows for a fixed endpoint `x_f`, ready to evaluate the drift.
#[derive(Debug, Clone)]
pub struct BridgeKernel<'m> {
    model: &'m SpectralModel,
    x_f: f64,
    /// `ψₙ(x_f)` for every retained mode.
    psi_f: Vec<f64>,
    epsilon_switch: f64,
}

impl<'m> BridgeKernel<'m> {
    pub fn new(model: &'m SpectralModel, x_f: f64, epsilon_switch: f64) -> Result<Self> {
        let (j, u) = model
            .locate(x_f, 1)
            .ok_or_else(|| BridgeError::DomainTooSmall {
                x_min: model.x_min(),
                x_max: model.x_max(),
                reason: format!("endpoint {x_f} outside the interpolation range"),
            })?;
        let w = cubic_weights(u);
        let modes = model.modes();
        let mut psi_f = vec![0.0; modes];
        for (i, wi) in w.iter().enumerate() {
            let row = model.row(j + i - 1);
            for n in 0..modes {
                psi_f[n] += wi * row[n];
            }
        }
        Ok(Self {
            model,
            x_f,
            psi_f,
            epsilon_switch,
        })
    }

    pub fn model(&self) -> &SpectralModel {
        self.model
    }

    /// Number of modes contributing at elapsed time `s`.
    pub fn modes_at(&self, s: f64) -> usize {
        let e0 = self.model.eigenvalues()[0];
        let limit = MODE_CUTOFF / s;
        self.model.eigenvalues()[..self.model.modes()].partition_point(|&e| e - e0 <= limit)
    }

    /// `(K, ∂ₓK)` at `x` with remaining time `s`, summing the first `modes` modes.
    /// `K` is scaled by `e^{sE₀}`.
    pub fn kernel(&self, x: f64, s: f64, modes: usize) -> Option<(f64, f64)> {
        let m = self.model;
        let (j, u) = m.locate(x, 2)?;
        let e0 = m.eigenvalues()[0];
        let coef: Vec<f64> = (0..modes)
            .map(|n| self.psi_f[n] * (-(s * (m.eigenvalues()[n] - e0))).exp())
            .collect();
        let mut kg = [0.0; 6];
        for (i, slot) in kg.iter_mut().enumerate() {
            let row = &m.row(j + i - 2)[..modes];
            *slot = row.iter().zip(&coef).map(|(a, b)| a * b).sum();
        }
        let h = m.spacing();
        let w = cubic_weights(u);
        let k: f64 = (0..4).map(|i| w[i] * kg[i + 1]).sum();
        let dk: f64 = (0..4).map(|i| w[i] * (kg[i + 2] - kg[i]) / (2.0 * h)).sum();
        Some((k, dk))
    }

    /// Exact conditioned drift at `(x, t)`; the free-bridge limit
    /// `(x_f − x)/(t_f − t)` below `epsilon_switch`.
    pub fn drift(&self, x: f64, t: f64, t_f: f64) -> Result<f64> {
        let s = t_f - t;
        if !(s > 0.0) {
            return Err(BridgeError::PastHorizon { t, t_f });
        }
        if s < self.epsilon_switch {
            return Ok((self.x_f - x) / s);
        }
        self.drift_with_modes(x, s, self.modes_at(s))
    }

    pub(crate) fn drift_with_modes(&self, x: f64, s: f64, modes: usize) -> Result<f64> {
        let (k, dk) = self.kernel(x, s, modes).ok_or_else(|| BridgeError::DomainTooSmall {
            x_min: self.model.x_min(),
            x_max: self.model.x_max(),
            reason: format!("x = {x} outside the interpolation range"),
        })?;
        if !(k > 0.0) {
            return Err(BridgeError::KernelNonPositive { x, s, value: k });
        }
        Ok(2.0 * self.model.diffusion() * dk / k)
    }

    /// The drift before simplification, `−U′/γ + 2D ∂ₓ ln P` with
    /// `∂ₓ ln P = βU′/2 + ∂ₓK/K`. Used to check the cancellation.
    pub fn drift_unsimplified(&self, surface: &(impl PotentialSurface + ?Sized), x: f64, s: f64) -> Result<f64> {
        let mut g = [0.0];
        surface.gradient(&[x], &mut g);
        let m = self.model;
        let beta = 1.0 / m.temperature();
        let (k, dk) = self.kernel(x, s, self.modes_at(s)).ok_or(BridgeError::DomainTooSmall {
            x_min: m.x_min(),
            x_max: m.x_max(),
            reason: format!("x = {x} outside the interpolation range"),
        })?;
        Ok(-g[0] / m.gamma() + 2.0 * m.diffusion() * (0.5 * beta * g[0] + dk / k))
    }
}

/// Conditioned drift from the spectral model at `(x, t)` for `problem`.
pub fn bridge_drift(model: &SpectralModel, x: f64, t: f64, problem: &BridgeProblem, config: &SpectralConfig) -> Result<f64> {
    let kernel = BridgeKernel::new(model, problem.r_f()[0], config.epsilon_for(problem))?;
    kernel.drift(x, t, problem.t_f())
}

/// Reusable exact solver: builds the model once, solves for many noise paths.
#[derive(Debug, Clone)]
pub struct ExactBridge {
    problem: BridgeProblem,
    model: SpectralModel,
    epsilon_switch: f64,
}

impl ExactBridge {
    pub fn new(problem: &BridgeProblem, surface: &(impl PotentialSurface + ?Sized), config: &SpectralConfig) -> Result<Self> {
        config.validate_for(problem)?;
        let epsilon = config.epsilon_for(problem);
        let floor = epsilon.max(problem.dt());
        let model = build_model_for(surface, problem.temperature(), problem.gamma(), config, Some((floor, MODE_CUTOFF)))?;
        Ok(Self {
            problem: problem.clone(),
            model,
            epsilon_switch: epsilon,
        })
    }

    pub fn model(&self) -> &SpectralModel {
        &self.model
    }

    /// Euler–Maruyama integration of the exact bridge equation, pinned like the free bridge.
    pub fn solve(&self, noise: &NoisePath) -> Result<Trajectory> {
        let p = &self.problem;
        if !noise.matches(p) {
            return Err(BridgeError::GridMismatch("noise path does not match problem".into()));
        }
        let kernel = BridgeKernel::new(&self.model, p.r_f()[0], self.epsilon_switch)?;
        let steps = p.steps();
        let amp = p.noise_amplitude();
        let mut pos = vec![0.0; steps + 1];
        pos[0] = p.r_i()[0];
        for k in 0..steps - 1 {
            let x = pos[k];
            let drift = match kernel.drift(x, p.time(k), p.t_f()) {
                Err(BridgeError::DomainTooSmall { .. }) => {
                    return Err(BridgeError::ExitedDomain { step: k, x });
                }
                other => other?,
            };
            pos[k + 1] = x + p.dt() * drift + amp * noise.at(k)[0];
            if !pos[k + 1].is_finite() {
                return Err(BridgeError::ExitedDomain { step: k + 1, x: pos[k + 1] });
            }
        }
        pos[steps] = p.r_f()[0];
        Trajectory::from_positions(p, pos)
    }
}

/// One-shot exact bridge for `problem` with `noise`.
pub fn exact_bridge_solve(
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    noise: &NoisePath,
    config: &SpectralConfig,
) -> Result<Trajectory> {
    ExactBridge::new(problem, surface, config)?.solve(noise)
}

#[cfg(test)]
mod tests;
