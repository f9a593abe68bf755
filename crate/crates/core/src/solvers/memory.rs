use crate::error::{BridgeError, Result};
use crate::potentials::PotentialSurface;
use crate::trajectory::{BridgeProblem, Trajectory};

use super::SchemeKind;

/// Width of the integration cell starting at node `k'`: `min(stride, I − k')·dt`.
#[inline]
pub(crate) fn cell_width(problem: &BridgeProblem, node: usize, stride: usize) -> f64 {
    stride.min(problem.steps() - node) as f64 * problem.dt()
}

/// Fills `out[k*N..]` with `∇V(r(k))` for `k = 0..I`, at the scheme's temperature.
pub(crate) fn effective_gradients(
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    positions: &[f64],
    scheme: SchemeKind,
    out: &mut [f64],
) {
    let n = problem.dim();
    let temp = scheme.gradient_temperature(problem.temperature());
    for k in 0..problem.steps() {
        surface.effective_gradient(&positions[k * n..(k + 1) * n], temp, &mut out[k * n..(k + 1) * n]);
    }
}

/// Memory drift at every `k < I` from precomputed `∇V` values.
///
/// `S(k) = (t_f − k'dt)·width(k')·∇V(k') + S(k + stride)` summed from the tail,
/// then `drift(k) = −(2/γ²)·S(k)/(t_f − k·dt)`.
pub(crate) fn memory_drifts(problem: &BridgeProblem, grads: &[f64], stride: usize, out: &mut [f64]) {
    let n = problem.dim();
    let steps = problem.steps();
    let coef = -2.0 / (problem.gamma() * problem.gamma());
    // out doubles as storage for S
    for k in (0..steps).rev() {
        let w = problem.remaining(k) * cell_width(problem, k, stride);
        let next = k + stride;
        for a in 0..n {
            let tail = if next < steps { out[next * n + a] } else { 0.0 };
            out[k * n + a] = w * grads[k * n + a] + tail;
        }
    }
    // the recurrence above needs raw sums at k + stride, so scale in a second pass
    for k in 0..steps {
        let s = problem.remaining(k);
        for a in 0..n {
            out[k * n + a] = coef * out[k * n + a] / s;
        }
    }
}

/// Left-Riemann memory drift `−(2/γ²) Σ_{k'} ((t_f − k'dt)/(t_f − k dt)) width(k') ∇V(r(k'))`
/// over `k' = k, k + stride, …, < I`.
pub fn memory_drift(
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    traj: &Trajectory,
    k: usize,
    scheme: SchemeKind,
    stride: usize,
) -> Result<Vec<f64>> {
    let steps = problem.steps();
    if k >= steps {
        return Err(BridgeError::IndexOutOfRange { index: k, limit: steps });
    }
    if stride == 0 {
        return Err(BridgeError::InvalidConfig("stride must be ≥ 1".into()));
    }
    if traj.len() != steps + 1 || traj.dim() != problem.dim() {
        return Err(BridgeError::GridMismatch("trajectory does not match problem".into()));
    }
    let n = problem.dim();
    let temp = scheme.gradient_temperature(problem.temperature());
    let mut acc = vec![0.0; n];
    let mut g = vec![0.0; n];
    let nodes: Vec<usize> = (k..steps).step_by(stride).collect();
    for &kp in nodes.iter().rev() {
        surface.effective_gradient(traj.point(kp), temp, &mut g);
        let w = problem.remaining(kp) * cell_width(problem, kp, stride);
        for a in 0..n {
            acc[a] = w * g[a] + acc[a];
        }
    }
    let coef = -2.0 / (problem.gamma() * problem.gamma());
    let s = problem.remaining(k);
    Ok(acc.into_iter().map(|v| coef * v / s).collect())
}
