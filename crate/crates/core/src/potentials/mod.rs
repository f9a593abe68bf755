//! Potential energy surfaces and the temperature-dependent effective potential
//!
//! `V(r, T) = |∇U|²/4 − (T/2) ∇²U` with `k_B = 1`. Its gradient is
//! `∇V = (1/2) H·∇U − (T/2) ∇(∇²U)` where `H` is the Hessian of `U`.
//!
//! Built-in surfaces provide analytic derivatives up to third order. A
//! user-defined surface only has to supply the energy and gradient; the
//! Hessian and the gradient of the Laplacian then fall back to central
//! finite differences.

mod mueller;
mod quartic;
mod simple;
mod stationary;

pub use mueller::{MuellerParams, MuellerPoint, MuellerSurface};
pub use quartic::QuarticWell;
pub use simple::{Flat, Harmonic};
pub use stationary::{refine_minimum, refine_stationary_point};

use crate::error::{BridgeError, Result};

/// Relative step for finite-difference fallbacks of first derivatives.
const FD_STEP: f64 = 1e-5;
/// Relative step for nested finite differences (third derivatives).
const FD_STEP_NESTED: f64 = 1e-3;

pub trait PotentialSurface: Send + Sync {
    fn dimension(&self) -> usize;

    fn energy(&self, r: &[f64]) -> f64;

    fn gradient(&self, r: &[f64], out: &mut [f64]);

    /// Row-major `N × N` Hessian.
    fn hessian(&self, r: &[f64], out: &mut [f64]) {
        let n = self.dimension();
        let mut x = r.to_vec();
        let mut gp = vec![0.0; n];
        let mut gm = vec![0.0; n];
        for j in 0..n {
            let h = FD_STEP * r[j].abs().max(1.0);
            x[j] = r[j] + h;
            self.gradient(&x, &mut gp);
            x[j] = r[j] - h;
            self.gradient(&x, &mut gm);
            x[j] = r[j];
            for i in 0..n {
                out[i * n + j] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        // symmetrize the finite-difference estimate
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (out[i * n + j] + out[j * n + i]);
                out[i * n + j] = m;
                out[j * n + i] = m;
            }
        }
    }

    fn laplacian(&self, r: &[f64]) -> f64 {
        let n = self.dimension();
        let mut h = vec![0.0; n * n];
        self.hessian(r, &mut h);
        (0..n).map(|i| h[i * n + i]).sum()
    }

    /// `∇(∇²U)`.
    fn laplacian_gradient(&self, r: &[f64], out: &mut [f64]) {
        let mut x = r.to_vec();
        for j in 0..self.dimension() {
            let h = FD_STEP_NESTED * r[j].abs().max(1.0);
            x[j] = r[j] + h;
            let lp = self.laplacian(&x);
            x[j] = r[j] - h;
            let lm = self.laplacian(&x);
            x[j] = r[j];
            out[j] = (lp - lm) / (2.0 * h);
        }
    }

    fn effective_potential(&self, r: &[f64], temperature: f64) -> f64 {
        let mut g = vec![0.0; self.dimension()];
        self.gradient(r, &mut g);
        let g2: f64 = g.iter().map(|v| v * v).sum();
        let lap = if temperature == 0.0 {
            0.0
        } else {
            self.laplacian(r)
        };
        0.25 * g2 - 0.5 * temperature * lap
    }

    fn effective_gradient(&self, r: &[f64], temperature: f64, out: &mut [f64]) {
        let n = self.dimension();
        let mut g = vec![0.0; n];
        let mut h = vec![0.0; n * n];
        self.gradient(r, &mut g);
        self.hessian(r, &mut h);
        for i in 0..n {
            out[i] = 0.5 * (0..n).map(|j| h[i * n + j] * g[j]).sum::<f64>();
        }
        if temperature != 0.0 {
            let mut lg = vec![0.0; n];
            self.laplacian_gradient(r, &mut lg);
            for i in 0..n {
                out[i] -= 0.5 * temperature * lg[i];
            }
        }
    }
}

impl<S: PotentialSurface + ?Sized> PotentialSurface for &S {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn energy(&self, r: &[f64]) -> f64 {
        (**self).energy(r)
    }
    fn gradient(&self, r: &[f64], out: &mut [f64]) {
        (**self).gradient(r, out)
    }
    fn hessian(&self, r: &[f64], out: &mut [f64]) {
        (**self).hessian(r, out)
    }
    fn laplacian(&self, r: &[f64]) -> f64 {
        (**self).laplacian(r)
    }
    fn laplacian_gradient(&self, r: &[f64], out: &mut [f64]) {
        (**self).laplacian_gradient(r, out)
    }
    fn effective_potential(&self, r: &[f64], temperature: f64) -> f64 {
        (**self).effective_potential(r, temperature)
    }
    fn effective_gradient(&self, r: &[f64], temperature: f64, out: &mut [f64]) {
        (**self).effective_gradient(r, temperature, out)
    }
}

fn check_point(surface: &(impl PotentialSurface + ?Sized), r: &[f64]) -> Result<()> {
    if r.len() != surface.dimension() {
        return Err(BridgeError::DimensionMismatch {
            expected: surface.dimension(),
            got: r.len(),
        });
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(BridgeError::NonFinite(format!("position {r:?}")));
    }
    Ok(())
}

fn check_temperature(temperature: f64) -> Result<()> {
    if !temperature.is_finite() {
        return Err(BridgeError::NonFinite(format!("temperature {temperature}")));
    }
    if temperature < 0.0 {
        return Err(BridgeError::NegativeTemperature(temperature));
    }
    Ok(())
}

/// `U(r)` with input validation.
pub fn energy(surface: &(impl PotentialSurface + ?Sized), r: &[f64]) -> Result<f64> {
    check_point(surface, r)?;
    Ok(surface.energy(r))
}

/// `V(r, T)` with input validation.
pub fn effective_potential(
    surface: &(impl PotentialSurface + ?Sized),
    r: &[f64],
    temperature: f64,
) -> Result<f64> {
    check_point(surface, r)?;
    check_temperature(temperature)?;
    Ok(surface.effective_potential(r, temperature))
}

/// `∇V(r, T)` with input validation.
pub fn effective_gradient(
    surface: &(impl PotentialSurface + ?Sized),
    r: &[f64],
    temperature: f64,
) -> Result<Vec<f64>> {
    check_point(surface, r)?;
    check_temperature(temperature)?;
    let mut out = vec![0.0; surface.dimension()];
    surface.effective_gradient(r, temperature, &mut out);
    Ok(out)
}

#[cfg(test)]
pub(crate) mod fd {
    //! Finite-difference oracles shared by the surface tests.
    use super::PotentialSurface;

    pub fn grad_of(f: impl Fn(&[f64]) -> f64, r: &[f64], h: f64) -> Vec<f64> {
        let mut x = r.to_vec();
        (0..r.len())
            .map(|j| {
                x[j] = r[j] + h;
                let fp = f(&x);
                x[j] = r[j] - h;
                let fm = f(&x);
                x[j] = r[j];
                (fp - fm) / (2.0 * h)
            })
            .collect()
    }

    pub fn laplacian_of(f: impl Fn(&[f64]) -> f64, r: &[f64], h: f64) -> f64 {
        let mut x = r.to_vec();
        let f0 = f(r);
        (0..r.len())
            .map(|j| {
                x[j] = r[j] + h;
                let fp = f(&x);
                x[j] = r[j] - h;
                let fm = f(&x);
                x[j] = r[j];
                (fp - 2.0 * f0 + fm) / (h * h)
            })
            .sum()
    }

    pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt().max(1e-8);
        diff / scale
    }

    pub fn grad(s: &impl PotentialSurface, r: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; s.dimension()];
        s.gradient(r, &mut g);
        g
    }
}
