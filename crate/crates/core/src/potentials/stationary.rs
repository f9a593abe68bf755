use super::PotentialSurface;
use crate::error::{BridgeError, Result};

const MAX_NEWTON_STEPS: usize = 100;
const GRADIENT_TOL: f64 = 1e-10;

fn seed_xy(seed: &[f64]) -> (f64, f64) {
    (seed[0], seed.get(1).copied().unwrap_or(0.0))
}

fn fail(seed: &[f64], reason: impl Into<String>) -> BridgeError {
    let (seed_x, seed_y) = seed_xy(seed);
    BridgeError::RefinementFailed {
        seed_x,
        seed_y,
        reason: reason.into(),
    }
}

/// Solves `a·x = b` in place by Gaussian elimination with partial pivoting.
fn solve_dense(a: &mut [f64], b: &mut [f64]) -> Option<()> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            b.swap(piv, col);
        }
        for i in (col + 1)..n {
            let f = a[i * n + col] / a[col * n + col];
            for j in col..n {
                a[i * n + j] -= f * a[col * n + j];
            }
            b[i] -= f * b[col];
        }
    }
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|j| a[i * n + j] * b[j]).sum();
        b[i] = (b[i] - s) / a[i * n + i];
    }
    Some(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Newton iteration on `∇U = 0` with step halving on the gradient norm.
/// Converges to whichever stationary point (minimum or saddle) is nearest
/// the seed.
pub fn refine_stationary_point(
    surface: &(impl PotentialSurface + ?Sized),
    seed: &[f64],
) -> Result<Vec<f64>> {
    let n = surface.dimension();
    if seed.len() != n {
        return Err(BridgeError::DimensionMismatch {
            expected: n,
            got: seed.len(),
        });
    }
    let mut r = seed.to_vec();
    let mut g = vec![0.0; n];
    let mut h = vec![0.0; n * n];
    let mut trial = vec![0.0; n];
    let mut g_trial = vec![0.0; n];
    surface.gradient(&r, &mut g);
    for _ in 0..MAX_NEWTON_STEPS {
        let gn = norm(&g);
        if gn < GRADIENT_TOL {
            return Ok(r);
        }
        surface.hessian(&r, &mut h);
        let mut step: Vec<f64> = g.iter().map(|v| -v).collect();
        solve_dense(&mut h, &mut step).ok_or_else(|| fail(seed, "singular Hessian"))?;
        let mut scale = 1.0;
        loop {
            for i in 0..n {
                trial[i] = r[i] + scale * step[i];
            }
            surface.gradient(&trial, &mut g_trial);
            if norm(&g_trial) < gn || scale < 1e-6 {
                break;
            }
            scale *= 0.5;
        }
        r.copy_from_slice(&trial);
        g.copy_from_slice(&g_trial);
        if r.iter().any(|v| !v.is_finite()) {
            return Err(fail(seed, "iterate became non-finite"));
        }
    }
    if norm(&g) < 1e-8 {
        Ok(r)
    } else {
        Err(fail(seed, format!("|∇U| = {:e} after {MAX_NEWTON_STEPS} Newton steps", norm(&g))))
    }
}

/// Like [`refine_stationary_point`] but additionally requires a positive
/// definite Hessian at the result.
pub fn refine_minimum(surface: &(impl PotentialSurface + ?Sized), seed: &[f64]) -> Result<Vec<f64>> {
    let r = refine_stationary_point(surface, seed)?;
    let n = surface.dimension();
    let mut h = vec![0.0; n * n];
    surface.hessian(&r, &mut h);
    // Cholesky test for positive definiteness
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            if i == j {
                let d = h[i * n + i] - s;
                if d <= 0.0 {
                    return Err(fail(seed, format!("stationary point {r:?} is not a minimum")));
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (h[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    Ok(r)
}
