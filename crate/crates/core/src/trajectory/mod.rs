//! Uniform time grids, pinned trajectories and reproducible noise streams.

mod csv;
mod noise;
mod problem;

pub use self::csv::{parse_csv, CsvTrajectory};
pub use noise::{make_noise, NoisePath, RNG_ALGORITHM};
pub use problem::BridgeProblem;

use crate::error::{BridgeError, Result};

/// Positions on the grid `t_k = k·dt`, `k = 0..=I`, stored flat.
/// Point 0 is `r_i` and point `I` is `r_f`, both bit-exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    dt: f64,
    positions: Vec<f64>,
}

impl Trajectory {
    /// Wraps raw positions, checking length, finiteness and pinning.
    pub fn from_positions(problem: &BridgeProblem, positions: Vec<f64>) -> Result<Self> {
        let n = problem.dim();
        let expected = (problem.steps() + 1) * n;
        if positions.len() != expected {
            return Err(BridgeError::GridMismatch(format!(
                "expected {expected} coordinates, got {}",
                positions.len()
            )));
        }
        if let Some(i) = positions.iter().position(|v| !v.is_finite()) {
            return Err(BridgeError::NonFinite(format!("trajectory point {}", i / n)));
        }
        let t = Self {
            dim: n,
            dt: problem.dt(),
            positions,
        };
        if t.point(0) != problem.r_i() || t.point(problem.steps()) != problem.r_f() {
            return Err(BridgeError::InvalidProblem(
                "trajectory endpoints must equal r_i and r_f".into(),
            ));
        }
        Ok(t)
    }

    /// Straight line from `r_i` to `r_f`.
    pub fn chord(problem: &BridgeProblem) -> Self {
        let n = problem.dim();
        let steps = problem.steps();
        let mut positions = Vec::with_capacity((steps + 1) * n);
        for k in 0..=steps {
            let u = k as f64 / steps as f64;
            for a in 0..n {
                positions.push(problem.r_i()[a] + (problem.r_f()[a] - problem.r_i()[a]) * u);
            }
        }
        positions[..n].copy_from_slice(problem.r_i());
        positions[steps * n..].copy_from_slice(problem.r_f());
        Self {
            dim: n,
            dt: problem.dt(),
            positions,
        }
    }

    pub(crate) fn from_parts_unchecked(dim: usize, dt: f64, positions: Vec<f64>) -> Self {
        Self { dim, dt, positions }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    /// Number of grid points, `I + 1`.
    pub fn len(&self) -> usize {
        self.positions.len() / self.dim
    }
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
    pub fn steps(&self) -> usize {
        self.len() - 1
    }
    pub fn point(&self, k: usize) -> &[f64] {
        &self.positions[k * self.dim..(k + 1) * self.dim]
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.positions
    }
    pub fn into_positions(self) -> Vec<f64> {
        self.positions
    }
    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.positions.chunks_exact(self.dim)
    }

    pub fn same_grid(&self, other: &Trajectory) -> bool {
        self.dim == other.dim && self.positions.len() == other.positions.len() && self.dt == other.dt
    }

    /// CSV with header `step,t,x0[,x1,...]` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        csv::format(self)
    }
}

/// One Euler–Maruyama step of the bridge dynamics:
/// `r + dt·(r_f − r)/(t_f − t) + dt·extra + amp·ξ`.
///
/// Every generator routes through here so that a vanishing `extra` yields
/// bit-identical results to the free bridge.
#[inline]
pub(crate) fn bridge_step(
    out: &mut [f64],
    r: &[f64],
    r_f: &[f64],
    remaining: f64,
    dt: f64,
    extra: Option<&[f64]>,
    amp: f64,
    xi: &[f64],
) {
    for a in 0..r.len() {
        let mut v = r[a] + dt * (r_f[a] - r[a]) / remaining;
        if let Some(e) = extra {
            v += dt * e[a];
        }
        out[a] = v + amp * xi[a];
    }
}

/// Free Brownian bridge driven by `noise`; the last point is pinned to
/// `r_f` without noise.
pub fn free_bridge(problem: &BridgeProblem, noise: &NoisePath) -> Result<Trajectory> {
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
        bridge_step(
            &mut tail[..n],
            &head[k * n..],
            problem.r_f(),
            problem.remaining(k),
            problem.dt(),
            None,
            amp,
            noise.at(k),
        );
    }
    pos[steps * n..].copy_from_slice(problem.r_f());
    Ok(Trajectory::from_parts_unchecked(n, problem.dt(), pos))
}
