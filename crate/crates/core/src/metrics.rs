//! Trajectory comparison, ensemble statistics and the paired temperature sweep.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BridgeError, Result};
use crate::potentials::PotentialSurface;
use crate::solvers::{fixed_point_solve, SchemeKind, SolveReport, SolverConfig};
use crate::spectral::{ExactBridge, SpectralConfig};
use crate::trajectory::{BridgeProblem, NoisePath, Trajectory};

fn norm(v: &[f64]) -> f64 {
    if v.len() == 1 {
        v[0].abs()
    } else {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn check_grid(a: &Trajectory, b: &Trajectory) -> Result<()> {
    if a.same_grid(b) {
        Ok(())
    } else {
        Err(BridgeError::GridMismatch(format!(
            "{} points × {} dims (dt {}) vs {} points × {} dims (dt {})",
            a.len(),
            a.dim(),
            a.dt(),
            b.len(),
            b.dim(),
            b.dt()
        )))
    }
}

/// Symmetric mean absolute percentage error over all grid points, in percent.
/// Points where both trajectories sit at the origin contribute 0.
pub fn smape(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    check_grid(a, b)?;
    let n = a.dim();
    let mut diff = vec![0.0; n];
    let total: f64 = a
        .points()
        .zip(b.points())
        .map(|(p, q)| {
            let den = norm(p) + norm(q);
            if den == 0.0 {
                return 0.0;
            }
            for (d, (x, y)) in diff.iter_mut().zip(p.iter().zip(q)) {
                *d = x - y;
            }
            norm(&diff) / den
        })
        .sum();
    Ok(200.0 * total / a.len() as f64)
}

/// Per-grid-point mean and unbiased variance, flattened like the trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub dim: usize,
    pub samples: usize,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

pub fn ensemble_stats(trajs: &[Trajectory]) -> Result<EnsembleStats> {
    if trajs.len() < 2 {
        return Err(BridgeError::InvalidConfig(format!(
            "ensemble statistics need at least 2 trajectories, got {}",
            trajs.len()
        )));
    }
    let first = &trajs[0];
    for t in &trajs[1..] {
        check_grid(first, t)?;
    }
    let len = first.as_slice().len();
    let count = trajs.len() as f64;
    let mut mean = vec![0.0; len];
    for t in trajs {
        for (m, x) in mean.iter_mut().zip(t.as_slice()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= count);
    let mut variance = vec![0.0; len];
    for t in trajs {
        for ((v, m), x) in variance.iter_mut().zip(&mean).zip(t.as_slice()) {
            *v += (x - m) * (x - m);
        }
    }
    variance.iter_mut().for_each(|v| *v /= count - 1.0);
    Ok(EnsembleStats {
        dim: first.dim(),
        samples: trajs.len(),
        mean,
        variance,
    })
}

/// Mean and standard error of the mean; the error is 0 for fewer than 2 values.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Fixed parts of the paired exact-versus-approximate experiment.
#[derive(Debug, Clone)]
pub struct PairedProtocol {
    pub r_i: f64,
    pub r_f: f64,
    pub t_f: f64,
    pub dt: f64,
    pub gamma: f64,
    pub scheme: SchemeKind,
    pub solver: SolverConfig,
    pub spectral: SpectralConfig,
    pub master_seed: u64,
}

impl PairedProtocol {
    pub fn problem(&self, temperature: f64) -> Result<BridgeProblem> {
        BridgeProblem::new(vec![self.r_i], vec![self.r_f], self.t_f, self.dt, temperature, self.gamma)
    }

    /// Noise stream for pair `pair` at temperature slot `temp_index`.
    pub fn stream(temp_index: usize, pair: usize) -> u64 {
        ((temp_index as u64) << 32) | pair as u64
    }
}

/// One exact/approximate pair sharing a noise path.
#[derive(Debug, Clone)]
pub struct PairOutcome {
    pub pair: usize,
    pub exact: Trajectory,
    pub approx: Trajectory,
    pub report: SolveReport,
    pub smape: f64,
}

/// Solves the exact and approximate bridges for `noise` and compares them.
pub fn run_pair(
    bridge: &ExactBridge,
    problem: &BridgeProblem,
    surface: &(impl PotentialSurface + ?Sized),
    protocol: &PairedProtocol,
    pair: usize,
    noise: &NoisePath,
) -> Result<PairOutcome> {
    let exact = bridge.solve(noise)?;
    let (approx, report) = fixed_point_solve(problem, surface, protocol.scheme, noise, &protocol.solver)?;
    let smape = smape(&exact, &approx)?;
    Ok(PairOutcome {
        pair,
        exact,
        approx,
        report,
        smape,
    })
}

/// How one pair of a sweep ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub pair: usize,
    /// `None` when either solve failed outright.
    pub smape: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmapeReport {
    pub temperature: f64,
    pub pairs: usize,
    /// SMAPE (%) of each converged pair, in pair order.
    pub values: Vec<f64>,
    pub records: Vec<PairRecord>,
    pub mean: f64,
    pub stderr: f64,
    /// Pairs that errored or did not converge; excluded from `values`.
    pub failures: usize,
}

impl SmapeReport {
    pub fn csv_header() -> &'static str {
        "temperature,pairs,mean_smape_pct,stderr_pct,failures"
    }

    /// Iterations of every pair whose solve returned, converged or not.
    pub fn iterations(&self) -> Vec<usize> {
        self.records.iter().filter_map(|r| r.iterations).collect()
    }

    /// Per-pair CSV: `pair,smape_pct,iterations,converged`.
    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("pair,smape_pct,iterations,converged\n");
        for r in &self.records {
            let smape = r.smape.map(|v| format!("{v:.16e}")).unwrap_or_default();
            let iters = r.iterations.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{smape},{iters},{}\n", r.pair, r.converged));
        }
        out
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{}",
            self.temperature, self.pairs, self.mean, self.stderr, self.failures
        )
    }
}

/// Sweep CSV text for `reports`, header included.
pub fn sweep_csv(reports: &[SmapeReport]) -> String {
    let mut out = String::from(SmapeReport::csv_header());
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Paired comparisons at every temperature. `keep` receives the first
/// successful pair of each temperature.
pub fn temperature_sweep_with(
    temps: &[f64],
    pairs: usize,
    surface: &(impl PotentialSurface + ?Sized),
    protocol: &PairedProtocol,
    mut keep: impl FnMut(usize, &PairOutcome),
) -> Result<Vec<SmapeReport>> {
    if pairs == 0 {
        return Err(BridgeError::InvalidConfig("pairs per temperature must be ≥ 1".into()));
    }
    if temps.is_empty() {
        return Err(BridgeError::InvalidConfig("no temperatures given".into()));
    }
    protocol.solver.validate()?;
    let mut reports = Vec::with_capacity(temps.len());
    for (ti, &temp) in temps.iter().enumerate() {
        let problem = protocol.problem(temp)?;
        let bridge = ExactBridge::new(&problem, surface, &protocol.spectral)?;
        let outcomes: Vec<Result<PairOutcome>> = (0..pairs)
            .into_par_iter()
            .map(|pair| {
                let noise = NoisePath::generate(&problem, protocol.master_seed, PairedProtocol::stream(ti, pair));
                run_pair(&bridge, &problem, surface, protocol, pair, &noise)
            })
            .collect();
        let mut values = Vec::new();
        let mut records = Vec::with_capacity(pairs);
        let mut failures = 0;
        let mut kept = false;
        for (pair, outcome) in outcomes.iter().enumerate() {
            match outcome {
                Ok(o) => {
                    records.push(PairRecord {
                        pair,
                        smape: Some(o.smape),
                        iterations: Some(o.report.iterations),
                        converged: o.report.converged,
                    });
                    if o.report.converged {
                        values.push(o.smape);
                    } else {
                        log::warn!(
                            "T = {temp}, pair {}: not converged after {} iterations (residual {:e})",
                            o.pair,
                            o.report.iterations,
                            o.report.final_residual
                        );
                        failures += 1;
                    }
                    if !kept {
                        keep(ti, o);
                        kept = true;
                    }
                }
                Err(e) => {
                    log::warn!("T = {temp}, pair {pair}: failed: {e}");
                    records.push(PairRecord {
                        pair,
                        smape: None,
                        iterations: None,
                        converged: false,
                    });
                    failures += 1;
                }
            }
        }
        let (mean, stderr) = mean_stderr(&values);
        reports.push(SmapeReport {
            temperature: temp,
            pairs,
            values,
            records,
            mean,
            stderr,
            failures,
        });
    }
    Ok(reports)
}

pub fn temperature_sweep(
    temps: &[f64],
    pairs: usize,
    surface: &(impl PotentialSurface + ?Sized),
    protocol: &PairedProtocol,
) -> Result<Vec<SmapeReport>> {
    temperature_sweep_with(temps, pairs, surface, protocol, |_, _| {})
}
