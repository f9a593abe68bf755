use crate::error::{BridgeError, Result};
use crate::potentials::PotentialSurface;
use crate::quadrature::TensorGaussHermite;
use crate::trajectory::{bridge_step, BridgeProblem, NoisePath, Trajectory};

/// `E_z[∇V(m + σ z)]` by tensor Gauss–Hermite, written into `out`.
fn smeared_gradient(
    surface: &(impl PotentialSurface + ?Sized),
    mean: &[f64],
    sigma: f64,
    temperature: f64,
    rule: &TensorGaussHermite,
    point: &mut [f64],
    g: &mut [f64],
    out: &mut [f64],
) {
    if sigma == 0.0 {
        surface.effective_gradient(mean, temperature, out);
        return;
    }
    out.fill(0.0);
    for i in 0..rule.len() {
        let z = rule.point(i);
        for a in 0..mean.len() {
            point[a] = mean[a] + sigma * z[a];
        }
        surface.effective_gradient(point, temperature, g);
        let w = rule.weights[i];
        for a in 0..mean.len() {
            out[a] += w * g[a];
        }
    }
}

/// Drift of the perturbative (cumulant) equation at `(r, t)`:
/// `−(2/γ²) ∫_t^{t_f} ((t_f − τ)/(t_f − t)) E_z[∇V(R(τ))] dτ` where
/// `R(τ)` is the chord from `(r, t)` to `(r_f, t_f)` plus Brownian-bridge
/// spread `σ(τ) = sqrt(2D(t_f − τ)(τ − t)/(t_f − t))`.
///
/// The τ-integral is a left-Riemann sum on nodes `t + j·stride·dt`, the
/// last cell truncated at `t_f`.
pub fn cumulant_drift(
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    r: &[f64],
    t: f64,
    rule: &TensorGaussHermite,
    stride: usize,
) -> Result<Vec<f64>> {
    let t_f = problem.t_f();
    if !(t < t_f) {
        return Err(BridgeError::PastHorizon { t, t_f });
    }
    if r.len() != problem.dim() || rule.dim != problem.dim() {
        return Err(BridgeError::DimensionMismatch {
            expected: problem.dim(),
            got: r.len(),
        });
    }
    if stride == 0 {
        return Err(BridgeError::InvalidConfig("stride must be ≥ 1".into()));
    }
    let h = stride as f64 * problem.dt();
    let span = t_f - t;
    let cells = ((span / h) - 1e-9).ceil().max(1.0) as usize;
    let nodes = (0..cells).map(|j| {
        let tau = t + j as f64 * h;
        (t_f - tau, (t_f - tau).min(h), tau - t)
    });
    Ok(integrate(problem, surface, r, span, nodes, rule))
}

/// Same rule on the problem grid starting at step `k` (nodes `k, k+stride, …`).
pub(crate) fn cumulant_drift_at_step(
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    r: &[f64],
    k: usize,
    rule: &TensorGaussHermite,
    stride: usize,
) -> Vec<f64> {
    let span = problem.remaining(k);
    let nodes = (k..problem.steps()).step_by(stride).map(|kp| {
        (
            problem.remaining(kp),
            super::memory::cell_width(problem, kp, stride),
            (kp - k) as f64 * problem.dt(),
        )
    });
    integrate(problem, surface, r, span, nodes, rule)
}

/// `nodes` yields `(t_f − τ, cell width, τ − t)`.
fn integrate(
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    r: &[f64],
    span: f64,
    nodes: impl Iterator<Item = (f64, f64, f64)>,
    rule: &TensorGaussHermite,
) -> Vec<f64> {
    let n = problem.dim();
    let d = problem.diffusion();
    let temp = problem.temperature();
    let r_f = problem.r_f();
    let mut acc = vec![0.0; n];
    let mut mean = vec![0.0; n];
    let mut point = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut e = vec![0.0; n];
    for (ahead, width, since) in nodes {
        for a in 0..n {
            mean[a] = (r_f[a] * since + r[a] * ahead) / span;
        }
        let sigma = (2.0 * d * ahead * since / span).max(0.0).sqrt();
        smeared_gradient(surface, &mean, sigma, temp, rule, &mut point, &mut g, &mut e);
        let w = ahead * width;
        for a in 0..n {
            acc[a] += w * e[a];
        }
    }
    let coef = -2.0 / (problem.gamma() * problem.gamma());
    acc.into_iter().map(|v| coef * v / span).collect()
}

/// Forward Euler–Maruyama integration of the cumulant equation. The drift
/// depends only on the current point, so a single pass solves it.
pub fn cumulant_trajectory(
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    noise: &NoisePath,
    rule: &TensorGaussHermite,
    stride: usize,
) -> Result<Trajectory> {
    if !noise.matches(problem) {
        return Err(BridgeError::GridMismatch("noise path does not match problem".into()));
    }
    let n = problem.dim();
    let steps = problem.steps();
    let amp = problem.noise_amplitude();
    let mut pos = vec![0.0; (steps + 1) * n];
    pos[..n].copy_from_slice(problem.r_i());
    for k in 0..steps - 1 {
        let (head, tail) = pos.split_at_mut((k + 1) * n);
        let r = &head[k * n..];
        let extra = cumulant_drift_at_step(problem, surface, r, k, rule, stride);
        bridge_step(
            &mut tail[..n],
            r,
            problem.r_f(),
            problem.remaining(k),
            problem.dt(),
            Some(&extra),
            amp,
            noise.at(k),
        );
        if tail[..n].iter().any(|v| !v.is_finite()) {
            return Err(BridgeError::Diverged {
                iteration: 0,
                step: k + 1,
                magnitude: f64::INFINITY,
            });
        }
    }
    pos[steps * n..].copy_from_slice(problem.r_f());
    Ok(Trajectory::from_parts_unchecked(n, problem.dt(), pos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{Flat, QuarticWell};
    use crate::solvers::{memory_drift, SchemeKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn flat_surface_gives_zero() {
        let p = BridgeProblem::new(vec![0.0], vec![1.0], 1.0, 0.01, 1.0, 1.0).unwrap();
        let rule = TensorGaussHermite::new(1, 21).unwrap();
        let d = cumulant_drift(&p, &Flat::new(1), &[0.3], 0.2, &rule, 1).unwrap();
        assert_eq!(d, vec![0.0]);
    }

    #[test]
    fn past_horizon_rejected() {
        let p = BridgeProblem::new(vec![0.0], vec![1.0], 1.0, 0.01, 1.0, 1.0).unwrap();
        let rule = TensorGaussHermite::new(1, 5).unwrap();
        assert!(matches!(
            cumulant_drift(&p, &QuarticWell, &[0.0], 1.0, &rule, 1),
            Err(BridgeError::PastHorizon { .. })
        ));
    }

    #[test]
    fn zero_diffusion_reduces_to_memory_drift_on_chord() {
        let p = BridgeProblem::new(vec![-1.0], vec![1.0], 3.0, 1e-3, 0.0, 1.0).unwrap();
        let rule = TensorGaussHermite::new(1, 21).unwrap();
        let k = 700;
        let r0 = -0.8;
        // chord from (r0, k dt) to (r_f, t_f), with points before k set to r0
        let mut pos = vec![r0; p.steps() + 1];
        for j in k..=p.steps() {
            let u = (j - k) as f64 / (p.steps() - k) as f64;
            pos[j] = r0 + (1.0 - r0) * u;
        }
        pos[0] = -1.0;
        pos[p.steps()] = 1.0;
        let chord = Trajectory::from_positions(&p, pos).unwrap();
        let mem = memory_drift(&p, &QuarticWell, &chord, k, SchemeKind::WeakDispersion, 1).unwrap();
        let cum = cumulant_drift(&p, &QuarticWell, &[r0], k as f64 * p.dt(), &rule, 1).unwrap();
        let on_grid = cumulant_drift_at_step(&p, &QuarticWell, &[r0], k, &rule, 1);
        assert!((mem[0] - cum[0]).abs() < 1e-10 * mem[0].abs(), "{mem:?} {cum:?}");
        assert!((mem[0] - on_grid[0]).abs() < 1e-12 * mem[0].abs());
    }

    /// Monte-Carlo oracle for the Gaussian expectation (10⁶ samples per node
    /// would be slow here; the acceptance suite runs the full-size check).
    #[test]
    fn gauss_hermite_matches_monte_carlo_expectation() {
        let t = 0.5;
        let rule = TensorGaussHermite::new(1, 21).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zs: Vec<f64> = (0..200_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        for (m, s) in [(0.0, 0.5), (0.4, 0.8), (-1.0, 0.3)] {
            let mut out = [0.0];
            smeared_gradient(&QuarticWell, &[m], s, t, &rule, &mut [0.0], &mut [0.0], &mut out);
            let mc: f64 = zs
                .iter()
                .map(|z| {
                    let mut g = [0.0];
                    QuarticWell.effective_gradient(&[m + s * z], t, &mut g);
                    g[0]
                })
                .sum::<f64>()
                / zs.len() as f64;
            assert!((out[0] - mc).abs() < 0.02 * out[0].abs().max(0.05), "{} vs {mc}", out[0]);
        }
    }

    #[test]
    fn cumulant_trajectory_is_pinned() {
        let p = BridgeProblem::new(vec![-1.0], vec![1.0], 0.5, 1e-3, 0.3, 1.0).unwrap();
        let rule = TensorGaussHermite::new(1, 11).unwrap();
        let noise = crate::trajectory::make_noise(&p, 2);
        let t = cumulant_trajectory(&p, &QuarticWell, &noise, &rule, 5).unwrap();
        assert_eq!(t.point(0), &[-1.0]);
        assert_eq!(t.point(p.steps()), &[1.0]);
    }
}
