use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::config::{Experiment, RunConfig, Surface};
use super::svg::{self, Bounds, Panel, Series};
use crate::error::{BridgeError, Result};
use crate::metrics::{ensemble_stats, mean_stderr, sweep_csv, temperature_sweep_with, PairedProtocol};
use crate::potentials::{MuellerPoint, MuellerSurface, PotentialSurface};
use crate::solvers::{
    fixed_point_residual, fixed_point_solve, instanton_residual, sample_ensemble, SchemeKind,
};
use crate::trajectory::{free_bridge, parse_csv, NoisePath, Trajectory, RNG_ALGORITHM};

/// Box and levels of the Mueller contour plot.
pub const MUELLER_BOX: [f64; 4] = [-1.5, 1.2, -0.2, 2.0];
pub const CONTOUR_GRID: usize = 201;
pub const CONTOUR_LEVELS: [f64; 11] = [-150.0, -125.0, -100.0, -75.0, -50.0, -25.0, 0.0, 25.0, 50.0, 75.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    /// Every solve converged.
    Complete,
    /// Some solves failed or hit the iteration cap.
    Partial,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Complete => 0,
            RunStatus::Partial => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub out_dir: PathBuf,
    pub summary: serde_json::Value,
}

/// Collects artifacts in memory and writes them in one pass at the end.
struct Artifacts {
    root: PathBuf,
    files: Vec<(PathBuf, String)>,
}

impl Artifacts {
    fn new(root: &Path) -> Self {
        Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn add(&mut self, rel: impl Into<PathBuf>, content: String) {
        self.files.push((rel.into(), content));
    }

    fn write(self) -> Result<Vec<PathBuf>> {
        let mut written = Vec::with_capacity(self.files.len());
        for (rel, content) in self.files {
            let path = self.root.join(&rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(&path, content)?;
            written.push(rel);
        }
        Ok(written)
    }
}

fn temp_label(t: f64) -> String {
    format!("T{t}")
}

/// Runs `config.experiment`.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    match config.experiment {
        Experiment::QuarticCompare => cmd_quartic_compare(config),
        Experiment::Mueller => cmd_mueller(config),
        Experiment::Instanton => cmd_instanton(config),
        Experiment::FreeBridge => cmd_free_bridge(config),
    }
}

fn finish(
    config: &RunConfig,
    mut artifacts: Artifacts,
    status: RunStatus,
    start: Instant,
    results: serde_json::Value,
    svgs: impl FnOnce(&Path) -> Result<Vec<(PathBuf, String)>>,
) -> Result<RunOutcome> {
    artifacts.add("config.toml", config.to_toml());
    let root = artifacts.root.clone();
    let mut files = artifacts.write()?;
    for (rel, content) in svgs(&root)? {
        fs::write(root.join(&rel), content)?;
        files.push(rel);
    }
    let summary = json!({
        "experiment": config.experiment.name(),
        "status": status,
        "seed": config.seed,
        "rng": RNG_ALGORITHM,
        "wall_time": start.elapsed().as_secs_f64(),
        "results": results,
        "files": files.iter().map(|p| p.to_string_lossy().into_owned()).collect::<Vec<_>>(),
    });
    fs::write(
        root.join("summary.json"),
        serde_json::to_string_pretty(&summary).expect("summary encodes") + "\n",
    )?;
    Ok(RunOutcome {
        status,
        out_dir: root,
        summary,
    })
}

fn read_trajectory(path: &Path) -> Result<crate::trajectory::CsvTrajectory> {
    parse_csv(&fs::read_to_string(path)?)
}

/// Paired exact-versus-approximate comparison on a 1D surface.
pub fn cmd_quartic_compare(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let start = Instant::now();
    let surface = config.surface();
    let base = config.problem(&surface, config.problem.temperatures[0])?;
    if base.dim() != 1 {
        return Err(BridgeError::InvalidConfig("the paired comparison needs a 1D surface".into()));
    }
    let protocol = PairedProtocol {
        r_i: base.r_i()[0],
        r_f: base.r_f()[0],
        t_f: config.problem.t_f,
        dt: config.problem.dt,
        gamma: config.problem.gamma,
        scheme: config.solver.scheme,
        solver: config.solver.solver_config(),
        spectral: config.spectral.clone(),
        master_seed: config.seed,
    };
    let temps = &config.problem.temperatures;
    let mut first: Vec<Option<(Trajectory, Trajectory, f64)>> = vec![None; temps.len()];
    let reports = temperature_sweep_with(temps, config.problem.count, surface.as_dyn(), &protocol, |ti, o| {
        first[ti] = Some((o.exact.clone(), o.approx.clone(), o.smape));
    })?;

    let mut artifacts = Artifacts::new(&config.out);
    artifacts.add("smape_sweep.csv", sweep_csv(&reports));
    let mut plotted = Vec::new();
    for (ti, report) in reports.iter().enumerate() {
        let label = temp_label(report.temperature);
        artifacts.add(format!("smape_{label}.csv"), report.pairs_csv());
        if let Some((exact, approx, smape)) = &first[ti] {
            artifacts.add(format!("{label}_exact.csv"), exact.to_csv());
            artifacts.add(format!("{label}_approx.csv"), approx.to_csv());
            plotted.push((label, report.temperature, *smape));
        }
    }
    let failures: usize = reports.iter().map(|r| r.failures).sum();
    let status = if failures == 0 { RunStatus::Complete } else { RunStatus::Partial };
    let results = json!(reports
        .iter()
        .map(|r| {
            let iters = r.iterations();
            json!({
                "temperature": r.temperature,
                "pairs": r.pairs,
                "mean_smape_pct": r.mean,
                "stderr_pct": r.stderr,
                "failures": r.failures,
                "max_iterations": iters.iter().max(),
                "mean_iterations": iters.iter().sum::<usize>() as f64 / iters.len().max(1) as f64,
            })
        })
        .collect::<Vec<_>>());
    finish(config, artifacts, status, start, results, |root| {
        let mut out = Vec::new();
        for (label, temp, smape) in &plotted {
            let exact = read_trajectory(&root.join(format!("{label}_exact.csv")))?;
            let approx = read_trajectory(&root.join(format!("{label}_approx.csv")))?;
            let series = |c: &crate::trajectory::CsvTrajectory, color: &str, width: f64| Series {
                points: c.times.iter().zip(&c.positions).map(|(t, x)| (*t, *x)).collect(),
                color: color.into(),
                width,
            };
            let a = series(&exact, "black", 1.2);
            let b = series(&approx, "red", 0.8);
            let bounds = Bounds::around(a.points.iter().chain(&b.points));
            let panel = Panel {
                title: format!("T = {temp}, SMAPE = {smape:.4}%"),
                x_label: "t".into(),
                y_label: "x".into(),
                bounds,
                series: vec![a, b],
                segments: Vec::new(),
            };
            out.push((PathBuf::from(format!("{label}_overlay.svg")), svg::render(&[panel], None)));
        }
        Ok(out)
    })
}

/// `max_k min_j |a(k) − b(j)|`: how far `a` strays from the curve `b`.
pub fn max_distance(a: &Trajectory, b: &Trajectory) -> f64 {
    a.points()
        .map(|p| {
            b.points()
                .map(|q| p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .fold(0.0, f64::max)
}

fn min_distance_to(traj: &Trajectory, point: &[f64]) -> f64 {
    traj.points()
        .map(|p| p.iter().zip(point).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min)
}

fn zero_temperature_path(
    config: &RunConfig,
    surface: &Surface,
) -> Result<(Trajectory, crate::solvers::SolveReport, crate::trajectory::BridgeProblem)> {
    let problem = config.problem(surface, 0.0)?;
    let noise = NoisePath::zeros(&problem);
    let (traj, report) = fixed_point_solve(
        &problem,
        surface.as_dyn(),
        SchemeKind::ZeroTemperature,
        &noise,
        &config.solver.solver_config(),
    )?;
    Ok((traj, report, problem))
}

fn contour_segments(surface: &dyn PotentialSurface) -> Vec<((f64, f64), (f64, f64))> {
    let [x0, x1, y0, y1] = MUELLER_BOX;
    let n = CONTOUR_GRID;
    let xs: Vec<f64> = (0..n).map(|i| x0 + (x1 - x0) * i as f64 / (n - 1) as f64).collect();
    let ys: Vec<f64> = (0..n).map(|i| y0 + (y1 - y0) * i as f64 / (n - 1) as f64).collect();
    let values: Vec<f64> = (0..n * n).map(|k| surface.energy(&[xs[k % n], ys[k / n]])).collect();
    CONTOUR_LEVELS
        .iter()
        .flat_map(|&level| svg::marching_squares(&xs, &ys, &values, level))
        .collect()
}

/// Ensembles on the Mueller surface at several temperatures around the
/// zero-temperature path.
pub fn cmd_mueller(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let start = Instant::now();
    let surface = config.surface();
    if surface.as_dyn().dimension() != 2 {
        return Err(BridgeError::InvalidConfig("the Mueller experiment needs a 2D surface".into()));
    }
    let solver = config.solver.solver_config();
    let (path0, report0, _) = zero_temperature_path(config, &surface)?;
    let mut artifacts = Artifacts::new(&config.out);
    artifacts.add("zero_temperature.csv", path0.to_csv());

    let mut dispersion = String::from(
        "temperature,count,converged,mean_max_distance,stderr_max_distance,mean_iterations,max_iterations\n",
    );
    let mut results = Vec::new();
    let mut all_converged = report0.converged;
    let mut labels = Vec::new();
    for &temp in &config.problem.temperatures {
        let problem = config.problem(&surface, temp)?;
        let members = sample_ensemble(
            &problem,
            surface.as_dyn(),
            config.solver.scheme,
            &solver,
            config.seed,
            config.problem.count,
        )?;
        let label = temp_label(temp);
        let mut table = String::from("index,converged,iterations,final_residual,max_distance,noise_checksum\n");
        let mut distances = Vec::new();
        let mut iterations = Vec::new();
        let mut converged = 0;
        for m in &members {
            match &m.outcome {
                Ok((traj, report)) => {
                    let d = max_distance(traj, &path0);
                    if report.converged {
                        converged += 1;
                        distances.push(d);
                    }
                    iterations.push(report.iterations);
                    table.push_str(&format!(
                        "{},{},{},{:.16e},{:.16e},{:016x}\n",
                        m.index, report.converged, report.iterations, report.final_residual, d, m.noise_checksum
                    ));
                    artifacts.add(format!("{label}/traj_{:04}.csv", m.index), traj.to_csv());
                }
                Err(e) => {
                    table.push_str(&format!("{},false,,,,{:016x}\n", m.index, m.noise_checksum));
                    log::warn!("T = {temp}, member {}: {e}", m.index);
                }
            }
        }
        all_converged &= converged == members.len();
        let (mean_d, se_d) = mean_stderr(&distances);
        let mean_it = iterations.iter().sum::<usize>() as f64 / iterations.len().max(1) as f64;
        let max_it = iterations.iter().copied().max().unwrap_or(0);
        dispersion.push_str(&format!(
            "{temp},{},{converged},{mean_d:.16e},{se_d:.16e},{mean_it:.6},{max_it}\n",
            members.len()
        ));
        artifacts.add(format!("{label}/members.csv"), table);
        results.push(json!({
            "temperature": temp,
            "count": members.len(),
            "converged": converged,
            "mean_max_distance": mean_d,
            "stderr_max_distance": se_d,
            "mean_iterations": mean_it,
            "max_iterations": max_it,
        }));
        labels.push((label, temp, members.len()));
    }
    artifacts.add("dispersion.csv", dispersion);
    let status = if all_converged { RunStatus::Complete } else { RunStatus::Partial };
    let results = json!({
        "zero_temperature": {"iterations": report0.iterations, "converged": report0.converged, "final_residual": report0.final_residual},
        "ensembles": results,
    });
    let contour_surface = surface.clone();
    finish(config, artifacts, status, start, results, move |root| {
        let segments = contour_segments(contour_surface.as_dyn());
        let zero = read_trajectory(&root.join("zero_temperature.csv"))?;
        let xy = |c: &crate::trajectory::CsvTrajectory| -> Vec<(f64, f64)> {
            (0..c.len()).map(|k| (c.point(k)[0], c.point(k)[1])).collect()
        };
        let [x0, x1, y0, y1] = MUELLER_BOX;
        let bounds = Bounds {
            x_min: x0,
            x_max: x1,
            y_min: y0,
            y_max: y1,
        };
        let mut out = Vec::new();
        for (label, temp, count) in &labels {
            let mut series = Vec::new();
            for j in 0..*count {
                let p = root.join(format!("{label}/traj_{j:04}.csv"));
                if p.exists() {
                    series.push(Series {
                        points: xy(&read_trajectory(&p)?),
                        color: "#3b75af".into(),
                        width: 0.5,
                    });
                }
            }
            series.push(Series {
                points: xy(&zero),
                color: "black".into(),
                width: 2.5,
            });
            let panel = Panel {
                title: format!("T = {temp}"),
                x_label: "x".into(),
                y_label: "y".into(),
                bounds,
                series,
                segments: segments.clone(),
            };
            out.push((PathBuf::from(format!("paths_{label}.svg")), svg::render(&[panel], Some(540.0))));
        }
        Ok(out)
    })
}

/// Zero-temperature fixed point with residual checks.
pub fn cmd_instanton(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let start = Instant::now();
    let surface = config.surface();
    let (traj, report, problem) = zero_temperature_path(config, &surface)?;
    let residual = instanton_residual(&problem, surface.as_dyn(), &traj)?;
    let integral = fixed_point_residual(
        &problem,
        surface.as_dyn(),
        SchemeKind::ZeroTemperature,
        &NoisePath::zeros(&problem),
        &traj,
        config.solver.stride,
    )?;
    let mut results = json!({
        "iterations": report.iterations,
        "converged": report.converged,
        "final_residual": report.final_residual,
        "instanton_residual": residual,
        "integral_residual": integral,
    });
    if let Surface::Mueller(m) = &surface {
        results["saddle_distance"] = saddle_proximity(m, &traj)?;
    }
    let mut artifacts = Artifacts::new(&config.out);
    artifacts.add("instanton.csv", traj.to_csv());
    let status = if report.converged { RunStatus::Complete } else { RunStatus::Partial };
    finish(config, artifacts, status, start, results, |root| {
        let c = read_trajectory(&root.join("instanton.csv"))?;
        let panel = if c.dim == 2 {
            let points: Vec<(f64, f64)> = (0..c.len()).map(|k| (c.point(k)[0], c.point(k)[1])).collect();
            Panel {
                title: "zero-temperature path".into(),
                x_label: "x".into(),
                y_label: "y".into(),
                bounds: Bounds::around(&points),
                series: vec![Series {
                    points,
                    color: "black".into(),
                    width: 1.5,
                }],
                segments: Vec::new(),
            }
        } else {
            let points: Vec<(f64, f64)> = c.times.iter().zip(&c.positions).step_by(c.dim).map(|(t, x)| (*t, *x)).collect();
            Panel {
                title: "zero-temperature path".into(),
                x_label: "t".into(),
                y_label: "x0".into(),
                bounds: Bounds::around(&points),
                series: vec![Series {
                    points,
                    color: "black".into(),
                    width: 1.5,
                }],
                segments: Vec::new(),
            }
        };
        Ok(vec![(PathBuf::from("instanton.svg"), svg::render(&[panel], None))])
    })
}

/// Closest approach of `traj` to the refined saddles F and G.
pub fn saddle_proximity(surface: &MuellerSurface, traj: &Trajectory) -> Result<serde_json::Value> {
    let mut out = serde_json::Map::new();
    for (name, point) in [("F", MuellerPoint::F), ("G", MuellerPoint::G)] {
        let s = surface.locate(point)?;
        out.insert(
            name.into(),
            json!({"saddle": s, "min_distance": min_distance_to(traj, &s)}),
        );
    }
    Ok(serde_json::Value::Object(out))
}

/// Free Brownian bridges with the ensemble variance profile.
pub fn cmd_free_bridge(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let start = Instant::now();
    let surface = config.surface();
    let mut artifacts = Artifacts::new(&config.out);
    let mut results = Vec::new();
    for (ti, &temp) in config.problem.temperatures.iter().enumerate() {
        let problem = config.problem(&surface, temp)?;
        let label = temp_label(temp);
        let trajs = (0..config.problem.count)
            .map(|j| {
                let noise = NoisePath::generate(&problem, config.seed, PairedProtocol::stream(ti, j));
                free_bridge(&problem, &noise)
            })
            .collect::<Result<Vec<_>>>()?;
        for (j, t) in trajs.iter().enumerate() {
            artifacts.add(format!("{label}/bridge_{j:04}.csv"), t.to_csv());
        }
        if trajs.len() >= 2 {
            let stats = ensemble_stats(&trajs)?;
            let n = problem.dim();
            let mut csv = String::from("step,t");
            for a in 0..n {
                csv.push_str(&format!(",mean_x{a}"));
            }
            for a in 0..n {
                csv.push_str(&format!(",var_x{a}"));
            }
            csv.push_str(",expected_var\n");
            let mut worst_z = 0.0f64;
            let samples = trajs.len() as f64;
            for k in 0..=problem.steps() {
                let t = problem.time(k);
                let expected = 2.0 * problem.diffusion() * t * (problem.t_f() - t) / problem.t_f();
                csv.push_str(&format!("{k},{t:.16e}"));
                for a in 0..n {
                    csv.push_str(&format!(",{:.16e}", stats.mean[k * n + a]));
                }
                for a in 0..n {
                    let v = stats.variance[k * n + a];
                    csv.push_str(&format!(",{v:.16e}"));
                    if expected > 0.0 {
                        let se = expected * (2.0 / (samples - 1.0)).sqrt();
                        worst_z = worst_z.max((v - expected).abs() / se);
                    }
                }
                csv.push_str(&format!(",{expected:.16e}\n"));
            }
            artifacts.add(format!("{label}/variance.csv"), csv);
            results.push(json!({"temperature": temp, "count": trajs.len(), "max_variance_z": worst_z}));
        } else {
            results.push(json!({"temperature": temp, "count": trajs.len()}));
        }
    }
    finish(config, artifacts, RunStatus::Complete, start, json!(results), |_| Ok(Vec::new()))
}
