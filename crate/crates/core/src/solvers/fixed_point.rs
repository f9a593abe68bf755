use std::time::Instant;

use rayon::prelude::*;

use super::cumulant::cumulant_trajectory;
use super::memory::{effective_gradients, memory_drifts};
use super::{InitKind, SchemeKind, SolveReport, SolverConfig, SweepKind};
use crate::error::{BridgeError, Result};
use crate::potentials::PotentialSurface;
use crate::quadrature::TensorGaussHermite;
use crate::trajectory::{bridge_step, free_bridge, BridgeProblem, NoisePath, Trajectory};

/// Factor on `max(|r_i|, |r_f|, 1)` beyond which a sweep counts as diverged.
const DIVERGENCE_FACTOR: f64 = 1e6;

/// Iterates the discretized integro-differential bridge equation with frozen
/// noise. Each call to [`sweep`](Self::sweep) produces iterate `n + 1` from
/// iterate `n`.
pub struct FixedPointSolver<'a, S: PotentialSurface + ?Sized> {
    problem: &'a BridgeProblem,
    surface: &'a S,
    scheme: SchemeKind,
    noise: &'a NoisePath,
    zero_noise: Option<NoisePath>,
    config: &'a SolverConfig,
    current: Vec<f64>,
    next: Vec<f64>,
    grads: Vec<f64>,
    memory: Vec<f64>,
    iterations: usize,
    last_change: f64,
    bound: f64,
}

impl<'a, S: PotentialSurface + ?Sized> FixedPointSolver<'a, S> {
    pub fn new(
        problem: &'a BridgeProblem,
        surface: &'a S,
        scheme: SchemeKind,
        noise: &'a NoisePath,
        config: &'a SolverConfig,
    ) -> Result<Self> {
        config.validate()?;
        if surface.dimension() != problem.dim() {
            return Err(BridgeError::DimensionMismatch {
                expected: problem.dim(),
                got: surface.dimension(),
            });
        }
        let zero_noise = (!scheme.uses_noise()).then(|| NoisePath::zeros(problem));
        if scheme.uses_noise() && !noise.matches(problem) {
            return Err(BridgeError::GridMismatch("noise path does not match problem".into()));
        }
        let effective_noise = zero_noise.as_ref().unwrap_or(noise);
        let init = match &config.init {
            InitKind::FreeBridge => free_bridge(problem, effective_noise)?,
            InitKind::CumulantTrajectory => {
                let rule = TensorGaussHermite::new(problem.dim(), config.quadrature_order_for(problem.dim()))?;
                cumulant_trajectory(problem, surface, effective_noise, &rule, config.integral_stride)?
            }
            InitKind::UserSupplied(t) => Trajectory::from_positions(problem, t.as_slice().to_vec())?,
        };
        let n = problem.dim();
        let steps = problem.steps();
        let scale = problem
            .r_i()
            .iter()
            .chain(problem.r_f())
            .fold(1.0f64, |m, v| m.max(v.abs()));
        Ok(Self {
            problem,
            surface,
            scheme,
            noise,
            zero_noise,
            config,
            next: init.as_slice().to_vec(),
            current: init.into_positions(),
            grads: vec![0.0; steps * n],
            memory: vec![0.0; steps * n],
            iterations: 0,
            last_change: f64::INFINITY,
            bound: DIVERGENCE_FACTOR * scale,
        })
    }

    fn noise(&self) -> &NoisePath {
        self.zero_noise.as_ref().unwrap_or(self.noise)
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn current(&self) -> Trajectory {
        Trajectory::from_parts_unchecked(self.problem.dim(), self.problem.dt(), self.current.clone())
    }

    /// Checksum of the noise consumed by the sweeps.
    pub fn noise_checksum(&self) -> u64 {
        self.noise().checksum()
    }

    /// One sweep; returns the max-norm change between the old and new iterate.
    pub fn sweep(&mut self) -> Result<f64> {
        let p = self.problem;
        let n = p.dim();
        let steps = p.steps();
        let amp = if self.scheme.uses_noise() {
            p.noise_amplitude()
        } else {
            0.0
        };
        effective_gradients(p, self.surface, &self.current, self.scheme, &mut self.grads);
        memory_drifts(p, &self.grads, self.config.integral_stride, &mut self.memory);
        let noise = self.zero_noise.as_ref().unwrap_or(self.noise);
        let iteration = self.iterations + 1;

        self.next[..n].copy_from_slice(p.r_i());
        for k in 0..steps - 1 {
            let (head, tail) = self.next.split_at_mut((k + 1) * n);
            let from = match self.config.sweep {
                SweepKind::Jacobi => &self.current[k * n..(k + 1) * n],
                SweepKind::GaussSeidel => &head[k * n..],
            };
            let out = &mut tail[..n];
            bridge_step(
                out,
                from,
                p.r_f(),
                p.remaining(k),
                p.dt(),
                Some(&self.memory[k * n..(k + 1) * n]),
                amp,
                noise.at(k),
            );
            for &v in out.iter() {
                if !(v.abs() <= self.bound) {
                    return Err(BridgeError::Diverged {
                        iteration,
                        step: k + 1,
                        magnitude: v.abs(),
                    });
                }
            }
        }
        self.next[steps * n..].copy_from_slice(p.r_f());

        let change = self
            .current
            .chunks_exact(n)
            .zip(self.next.chunks_exact(n))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
            .fold(0.0f64, f64::max);
        std::mem::swap(&mut self.current, &mut self.next);
        self.iterations = iteration;
        self.last_change = change;
        Ok(change)
    }

    /// Sweeps until the change drops below `tol` or `max_iter` is reached.
    pub fn run(mut self) -> Result<(Trajectory, SolveReport)> {
        let start = Instant::now();
        let mut converged = false;
        while self.iterations < self.config.max_iter {
            if self.sweep()? < self.config.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            log::debug!(
                "fixed point not converged after {} sweeps (change {:e})",
                self.iterations,
                self.last_change
            );
        }
        let report = SolveReport {
            iterations: self.iterations,
            final_residual: self.last_change,
            converged,
            wall_time: start.elapsed().as_secs_f64(),
            noise_checksum: self.noise_checksum(),
        };
        Ok((self.current(), report))
    }
}

/// Solves one conditioned trajectory with `scheme`.
///
/// The cumulant equation is Markovian, so it is integrated in a single
/// forward pass and reported as one iteration.
pub fn fixed_point_solve(
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    scheme: SchemeKind,
    noise: &NoisePath,
    config: &SolverConfig,
) -> Result<(Trajectory, SolveReport)> {
    if scheme == SchemeKind::Cumulant {
        config.validate()?;
        let start = Instant::now();
        let rule = TensorGaussHermite::new(problem.dim(), config.quadrature_order_for(problem.dim()))?;
        let traj = cumulant_trajectory(problem, surface, noise, &rule, config.integral_stride)?;
        return Ok((
            traj,
            SolveReport {
                iterations: 1,
                final_residual: 0.0,
                converged: true,
                wall_time: start.elapsed().as_secs_f64(),
                noise_checksum: noise.checksum(),
            },
        ));
    }
    FixedPointSolver::new(problem, surface, scheme, noise, config)?.run()
}

/// Max-norm change produced by one Jacobi sweep applied to `traj`: zero
/// exactly at a fixed point of the discretized equation.
pub fn fixed_point_residual(
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    scheme: SchemeKind,
    noise: &NoisePath,
    traj: &Trajectory,
    stride: usize,
) -> Result<f64> {
    let config = SolverConfig {
        init: InitKind::UserSupplied(traj.clone()),
        integral_stride: stride,
        max_iter: 1,
        ..SolverConfig::default()
    };
    let mut solver = FixedPointSolver::new(problem, surface, scheme, noise, &config)?;
    solver.sweep()
}

/// `max_k |(r(k+1) − 2r(k) + r(k−1))/dt² − (2/γ²)∇V₀(r(k))|` over interior points,
/// skipping `max(3, I/100)` points at each end.
pub fn instanton_residual(
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    traj: &Trajectory,
) -> Result<f64> {
    let steps = problem.steps();
    if traj.len() != steps + 1 || traj.dim() != problem.dim() {
        return Err(BridgeError::GridMismatch("trajectory does not match problem".into()));
    }
    if steps < 3 {
        return Err(BridgeError::InvalidProblem("instanton residual needs I ≥ 3".into()));
    }
    let n = problem.dim();
    let layer = (steps / 100).max(3);
    let dt2 = problem.dt() * problem.dt();
    let coef = 2.0 / (problem.gamma() * problem.gamma());
    let mut g = vec![0.0; n];
    let mut worst = 0.0f64;
    for k in layer.max(1)..=(steps - layer).min(steps - 1) {
        surface.effective_gradient(traj.point(k), 0.0, &mut g);
        let (rm, r0, rp) = (traj.point(k - 1), traj.point(k), traj.point(k + 1));
        let res: f64 = (0..n)
            .map(|a| {
                let acc = (rp[a] - 2.0 * r0[a] + rm[a]) / dt2;
                (acc - coef * g[a]).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Outcome of one ensemble member.
#[derive(Debug)]
pub struct EnsembleMember {
    pub index: u64,
    pub noise_checksum: u64,
    pub outcome: Result<(Trajectory, SolveReport)>,
}

impl EnsembleMember {
    pub fn solved(&self) -> Option<&(Trajectory, SolveReport)> {
        self.outcome.as_ref().ok()
    }
}

/// `count` independent solves; member `j` uses `NoisePath::member(problem, master_seed, j)`.
/// Failures are recorded per member and never abort the ensemble.
pub fn sample_ensemble(
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    scheme: SchemeKind,
    config: &SolverConfig,
    master_seed: u64,
    count: usize,
) -> Result<Vec<EnsembleMember>> {
    if count == 0 {
        return Err(BridgeError::InvalidConfig("ensemble count must be ≥ 1".into()));
    }
    config.validate()?;
    Ok((0..count as u64)
        .into_par_iter()
        .map(|index| {
            let noise = NoisePath::member(problem, master_seed, index);
            let outcome = fixed_point_solve(problem, surface, scheme, &noise, config);
            if let Err(e) = &outcome {
                log::warn!("ensemble member {index} failed: {e}");
            }
            EnsembleMember {
                index,
                noise_checksum: noise.checksum(),
                outcome,
            }
        })
        .collect())
}
