use serde::{Deserialize, Serialize};

use crate::error::{BridgeError, Result};
use crate::linalg::{symmetric_tridiagonal_eigen, tridiagonal_eigenvectors};
use crate::potentials::PotentialSurface;
use crate::trajectory::BridgeProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub x_min: f64,
    pub x_max: f64,
    /// Interior grid points `M`.
    pub grid_points: usize,
    /// Retained eigenpairs; `None` keeps every mode that can contribute
    /// (all `M` for a bare model).
    pub modes: Option<usize>,
    /// Remaining time below which the free-bridge drift is used;
    /// `None` means `10·dt`.
    pub epsilon_switch: Option<f64>,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            x_min: -3.0,
            x_max: 3.0,
            grid_points: 2048,
            modes: None,
            epsilon_switch: None,
        }
    }
}

/// Required distance of `r_i`, `r_f` from either boundary, as a fraction of the width.
pub const DOMAIN_MARGIN: f64 = 0.2;

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_max > self.x_min) {
            return Err(BridgeError::InvalidConfig(format!(
                "spectral domain [{}, {}] is empty",
                self.x_min, self.x_max
            )));
        }
        if self.grid_points < 64 {
            return Err(BridgeError::InvalidConfig(format!(
                "spectral grid needs at least 64 points, got {}",
                self.grid_points
            )));
        }
        if let Some(m) = self.modes {
            if m == 0 || m > self.grid_points {
                return Err(BridgeError::InvalidConfig(format!("modes must be in 1..={}", self.grid_points)));
            }
        }
        if let Some(e) = self.epsilon_switch {
            if !(e >= 0.0) {
                return Err(BridgeError::InvalidConfig(format!("epsilon_switch must be ≥ 0, got {e}")));
            }
        }
        Ok(())
    }

    /// Checks the grid and that both endpoints sit well inside the domain.
    pub fn validate_for(&self, problem: &BridgeProblem) -> Result<()> {
        self.validate()?;
        if problem.dim() != 1 {
            return Err(BridgeError::DimensionMismatch {
                expected: 1,
                got: problem.dim(),
            });
        }
        let margin = DOMAIN_MARGIN * (self.x_max - self.x_min);
        for &x in [problem.r_i()[0], problem.r_f()[0]].iter() {
            if x < self.x_min + margin || x > self.x_max - margin {
                return Err(BridgeError::DomainTooSmall {
                    x_min: self.x_min,
                    x_max: self.x_max,
                    reason: format!("endpoint {x} closer than {margin} to the boundary"),
                });
            }
        }
        Ok(())
    }

    pub fn epsilon_for(&self, problem: &BridgeProblem) -> f64 {
        self.epsilon_switch.unwrap_or(10.0 * problem.dt())
    }
}

/// Discretized Hamiltonian and its eigenpairs. Eigenvectors are normalized
/// so that `Σ_j ψₘ(x_j)ψₙ(x_j) h = δₘₙ`.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    x_min: f64,
    x_max: f64,
    h: f64,
    grid: Vec<f64>,
    diag: Vec<f64>,
    off: f64,
    eigenvalues: Vec<f64>,
    /// Grid-major: `psi[j*modes + n] = ψₙ(x_j)`.
    psi: Vec<f64>,
    modes: usize,
    temperature: f64,
    gamma: f64,
}

struct Assembly {
    h: f64,
    grid: Vec<f64>,
    diag: Vec<f64>,
    off: f64,
}

fn assemble(
    surface: &(impl PotentialSurface + ?Sized),
    temperature: f64,
    gamma: f64,
    config: &SpectralConfig,
) -> Result<Assembly> {
    config.validate()?;
    if surface.dimension() != 1 {
        return Err(BridgeError::DimensionMismatch {
            expected: 1,
            got: surface.dimension(),
        });
    }
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(BridgeError::InvalidProblem(format!(
            "spectral model needs T > 0, got {temperature}"
        )));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(BridgeError::InvalidProblem(format!("friction must be positive, got {gamma}")));
    }
    let m = config.grid_points;
    let h = (config.x_max - config.x_min) / (m + 1) as f64;
    let grid: Vec<f64> = (0..m).map(|j| config.x_min + (j + 1) as f64 * h).collect();
    let d = temperature / gamma;
    let beta = 1.0 / temperature;
    let diag: Vec<f64> = grid
        .iter()
        .map(|&x| 2.0 * d / (h * h) + d * beta * beta * surface.effective_potential(&[x], temperature))
        .collect();
    if diag.iter().any(|v| !v.is_finite()) {
        return Err(BridgeError::NonFinite("effective potential on the spectral grid".into()));
    }
    Ok(Assembly {
        h,
        grid,
        diag,
        off: -d / (h * h),
    })
}

/// Eigenvalues only, ascending, for all `M` grid points.
pub fn spectrum(
    surface: &(impl PotentialSurface + ?Sized),
    temperature: f64,
    gamma: f64,
    config: &SpectralConfig,
) -> Result<Vec<f64>> {
    let a = assemble(surface, temperature, gamma, config)?;
    let off = vec![a.off; a.grid.len() - 1];
    Ok(symmetric_tridiagonal_eigen(&a.diag, &off, false)?.values)
}

/// Assembles `−D·δ²/h² + Dβ²V(x_j, T)` with Dirichlet ends and diagonalizes it.
pub fn build_model(
    surface: &(impl PotentialSurface + ?Sized),
    temperature: f64,
    gamma: f64,
    config: &SpectralConfig,
) -> Result<SpectralModel> {
    build_model_for(surface, temperature, gamma, config, None)
}

/// As [`build_model`], but without the modes that are below `e^{−cutoff}`
/// at every time `s ≥ min_time`.
pub(crate) fn build_model_for(
    surface: &(impl PotentialSurface + ?Sized),
    temperature: f64,
    gamma: f64,
    config: &SpectralConfig,
    min_time: Option<(f64, f64)>,
) -> Result<SpectralModel> {
    let Assembly { h, grid, diag, off } = assemble(surface, temperature, gamma, config)?;
    let m = grid.len();
    let offs = vec![off; m - 1];
    let all = symmetric_tridiagonal_eigen(&diag, &offs, false)?.values;
    let mut modes = config.modes.unwrap_or(m);
    if let (None, Some((s, cutoff))) = (config.modes, min_time) {
        if s > 0.0 {
            let limit = cutoff / s;
            modes = all.partition_point(|&e| e - all[0] <= limit).clamp(1, m);
        }
    }
    let eigenvalues = all[..modes].to_vec();
    let vectors = tridiagonal_eigenvectors(&diag, &offs, &eigenvalues)?;
    let norm = 1.0 / h.sqrt();
    let mut psi = vec![0.0; m * modes];
    for n in 0..modes {
        let v = &vectors[n * m..(n + 1) * m];
        // largest component positive
        let pivot = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        let sign = if pivot < 0.0 { -norm } else { norm };
        for j in 0..m {
            psi[j * modes + n] = sign * v[j];
        }
    }
    Ok(SpectralModel {
        x_min: config.x_min,
        x_max: config.x_max,
        h,
        grid,
        diag,
        off,
        eigenvalues,
        psi,
        modes,
        temperature,
        gamma,
    })
}

impl SpectralModel {
    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn spacing(&self) -> f64 {
        self.h
    }
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
    pub fn modes(&self) -> usize {
        self.modes
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn diffusion(&self) -> f64 {
        self.temperature / self.gamma
    }

    /// `ψₙ(x_j)` for all retained `n`.
    #[inline]
    pub fn row(&self, j: usize) -> &[f64] {
        &self.psi[j * self.modes..(j + 1) * self.modes]
    }

    /// `ψₙ` on the grid.
    pub fn eigenvector(&self, n: usize) -> Vec<f64> {
        (0..self.grid.len()).map(|j| self.psi[j * self.modes + n]).collect()
    }

    /// Cell index `j` with `x_j ≤ x < x_{j+1}` and offset `u`, provided the
    /// nodes `j − reach ..= j + 1 + reach` exist.
    pub(crate) fn locate(&self, x: f64, reach: usize) -> Option<(usize, f64)> {
        if !x.is_finite() {
            return None;
        }
        let pos = (x - self.grid[0]) / self.h;
        let j = pos.floor();
        if j < reach as f64 || j + 1.0 + reach as f64 > (self.grid.len() - 1) as f64 {
            return None;
        }
        Some((j as usize, pos - j))
    }

    /// `max |Σ ψₘψₙ h − δₘₙ|` over retained modes.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.modes {
            for b in a..self.modes {
                let dot: f64 = (0..self.grid.len())
                    .map(|j| self.psi[j * self.modes + a] * self.psi[j * self.modes + b])
                    .sum::<f64>()
                    * self.h;
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `⟨ψₙ|H|ψₙ⟩ / ⟨ψₙ|ψₙ⟩` with the assembled matrix.
    pub fn rayleigh_quotient(&self, n: usize) -> f64 {
        let v = self.eigenvector(n);
        let m = v.len();
        let mut num = 0.0;
        for j in 0..m {
            let mut hv = self.diag[j] * v[j];
            if j > 0 {
                hv += self.off * v[j - 1];
            }
            if j + 1 < m {
                hv += self.off * v[j + 1];
            }
            num += v[j] * hv;
        }
        num / v.iter().map(|x| x * x).sum::<f64>()
    }
}
