use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;

use langevin_bridge::cli::{max_distance, Experiment, RunConfig};
use langevin_bridge::metrics::{ensemble_stats, mean_stderr, temperature_sweep, PairedProtocol, SmapeReport};
use langevin_bridge::potentials::{Flat, Harmonic, PotentialSurface, QuarticWell};
use langevin_bridge::quadrature::TensorGaussHermite;
use langevin_bridge::solvers::{
    cumulant_drift, fixed_point_solve, instanton_residual, sample_ensemble, InitKind, SchemeKind, SolverConfig,
    SweepKind,
};
use langevin_bridge::spectral::{build_model, exact_bridge_solve, BridgeKernel, SpectralConfig};
use langevin_bridge::trajectory::{free_bridge, BridgeProblem, NoisePath};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn verdict(criterion: u32, ok: bool, detail: &str) {
    println!("criterion {criterion}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
}

fn quartic_sweep() -> &'static [SmapeReport] {
    static SWEEP: OnceLock<Vec<SmapeReport>> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let config = RunConfig::defaults(Experiment::QuarticCompare);
        let protocol = PairedProtocol {
            r_i: -1.0,
            r_f: 1.0,
            t_f: 3.0,
            dt: 1e-3,
            gamma: 1.0,
            scheme: config.solver.scheme,
            solver: SolverConfig {
                tol: 1e-6,
                ..config.solver.solver_config()
            },
            spectral: config.spectral.clone(),
            master_seed: config.seed,
        };
        temperature_sweep(&[0.05, 0.5, 2.0], 100, &QuarticWell, &protocol).expect("quartic sweep")
    })
}

#[test]
fn criterion_1_quartic_smape_bands() {
    let bands = [(0.05, 0.004, 0.016), (0.5, 0.009, 0.034), (2.0, 0.013, 0.05)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (report, &(t, lo, hi)) in quartic_sweep().iter().zip(&bands) {
        assert_eq!(report.temperature, t);
        let inside = report.mean >= lo && report.mean <= hi && report.failures == 0;
        ok &= inside;
        detail.push(format!(
            "T={t}: mean {:.4}% in [{lo}%, {hi}%], {} failures",
            report.mean, report.failures
        ));
    }
    let detail = detail.join("; ");
    verdict(1, ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_2_smape_regime_ordering() {
    let sweep = quartic_sweep();
    let stats: Vec<(f64, f64)> = sweep.iter().map(|r| (r.mean, r.stderr)).collect();
    let increasing = stats.windows(2).all(|w| w[1].0 - w[0].0 > 2.0 * (w[0].1 + w[1].1));
    let enough = sweep.iter().all(|r| r.values.len() >= 100);
    let low = stats[0].0 + 2.0 * stats[0].1 <= 0.01;
    let high = stats[2].0 - 2.0 * stats[2].1 >= 0.02;
    let ok = increasing && enough && low && high;
    let detail = format!(
        "means±se {:?}, increasing {increasing}, ≥100 pairs {enough}, low {low}, high {high}",
        stats
    );
    verdict(2, ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_3_convergence_within_5000_iterations() {
    let mut ok = true;
    let mut detail = Vec::new();
    for report in quartic_sweep().iter().filter(|r| r.temperature <= 0.5) {
        let fast = report
            .records
            .iter()
            .filter(|r| r.converged && r.iterations.is_some_and(|n| n <= 5000))
            .count();
        let share = fast as f64 / report.pairs as f64;
        ok &= share >= 0.95;
        detail.push(format!("T={}: {fast}/{} within 5000", report.temperature, report.pairs));
    }
    let detail = detail.join("; ");
    verdict(3, ok, &detail);
    assert!(ok, "{detail}");
}

fn instanton_at(dt: f64) -> f64 {
    let problem = BridgeProblem::new(vec![-1.0], vec![1.0], 3.0, dt, 0.0, 1.0).unwrap();
    let config = SolverConfig {
        tol: 1e-13,
        sweep: SweepKind::GaussSeidel,
        ..RunConfig::defaults(Experiment::Instanton).solver.solver_config()
    };
    let noise = NoisePath::zeros(&problem);
    let (traj, report) =
        fixed_point_solve(&problem, &QuarticWell, SchemeKind::ZeroTemperature, &noise, &config).unwrap();
    assert!(report.converged, "zero-temperature solve at dt={dt} did not converge: {report:?}");
    instanton_residual(&problem, &QuarticWell, &traj).unwrap()
}

#[test]
fn criterion_4_instanton_residual_and_refinement() {
    let coarse = instanton_at(1e-3);
    let fine = instanton_at(5e-4);
    let ratio = coarse / fine;
    let ok = coarse < 1e-3 && ratio >= 3.0;
    let detail = format!("residual {coarse:.3e} (< 1e-3), dt/2 residual {fine:.3e}, ratio {ratio:.2} (≥ 3)");
    verdict(4, ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_5_free_particle_oracle() {
    let problem = BridgeProblem::new(vec![-1.0], vec![1.0], 3.0, 1e-3, 0.5, 1.0).unwrap();
    let flat = Flat::new(1);
    let noise = NoisePath::generate(&problem, 11, 0);
    let mut exact = true;
    for scheme in [
        SchemeKind::ZeroTemperature,
        SchemeKind::LowTemperature,
        SchemeKind::WeakDispersion,
        SchemeKind::Cumulant,
    ] {
        let own = if scheme.uses_noise() { noise.clone() } else { NoisePath::zeros(&problem) };
        let reference = free_bridge(&problem, &own).unwrap();
        for sweep in [SweepKind::Jacobi, SweepKind::GaussSeidel] {
            let config = SolverConfig {
                init: InitKind::UserSupplied(reference.clone()),
                sweep,
                ..SolverConfig::default()
            };
            let (traj, _) = fixed_point_solve(&problem, &flat, scheme, &noise, &config).unwrap();
            let same = traj.as_slice().iter().zip(reference.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits());
            exact &= same;
        }
    }

    let samples = 10_000;
    let trajs: Vec<_> = (0..samples)
        .map(|j| free_bridge(&problem, &NoisePath::generate(&problem, 5, j as u64)).unwrap())
        .collect();
    let stats = ensemble_stats(&trajs).unwrap();
    let mut worst = 0.0f64;
    for decile in 1..10 {
        let k = decile * problem.steps() / 10;
        let t = problem.time(k);
        let expected = 2.0 * problem.diffusion() * t * (problem.t_f() - t) / problem.t_f();
        let se = expected * (2.0 / (samples as f64 - 1.0)).sqrt();
        worst = worst.max((stats.variance[k] - expected).abs() / se);
    }
    let ok = exact && worst <= 3.0;
    let detail = format!("bit-exact {exact}, worst variance deviation {worst:.2} se (≤ 3)");
    verdict(5, ok, &detail);
    assert!(ok, "{detail}");
}

fn ou_drift(theta: f64, x: f64, x_f: f64, s: f64) -> f64 {
    let e = (-theta * s).exp();
    -theta * x + 2.0 * theta * e * (x_f - x * e) / (1.0 - e * e)
}

#[test]
fn criterion_6_spectral_oracle() {
    let mut eig = 0.0f64;
    for &(t, gamma) in &[(1.0f64, 1.0f64), (0.5, 1.0), (1.0, 2.0)] {
        let half = 12.0 * (t / gamma * t).sqrt();
        let cfg = SpectralConfig {
            x_min: -half,
            x_max: half,
            ..SpectralConfig::default()
        };
        let model = build_model(&Harmonic::new(1, 1.0), t, gamma, &cfg).unwrap();
        for n in 1..=5 {
            let want = n as f64 / gamma;
            eig = eig.max(((model.eigenvalues()[n] - want) / want).abs());
        }
    }

    let mut ou = 0.0f64;
    for &(theta, t) in &[(1.0, 1.0), (1.0, 0.5), (2.0, 0.5)] {
        let cfg = SpectralConfig {
            x_min: -12.0 * t,
            x_max: 12.0 * t,
            ..SpectralConfig::default()
        };
        let model = build_model(&Harmonic::new(1, theta), t, 1.0, &cfg).unwrap();
        let x_f = 0.8;
        let kernel = BridgeKernel::new(&model, x_f, 0.0).unwrap();
        for &s in &[0.01, 0.05, 0.2, 0.7, 1.5, 3.0] {
            let e = (-theta * s).exp();
            let spread = (t / theta * (1.0 - e * e)).sqrt();
            for c in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                let x = x_f * e + c * spread;
                let got = kernel.drift(x, 10.0 - s, 10.0).unwrap();
                let want = ou_drift(theta, x, x_f, s);
                ou = ou.max((got - want).abs() / want.abs().max(1.0));
            }
        }
    }

    let problem = BridgeProblem::new(vec![-1.0], vec![1.0], 3.0, 1e-3, 0.5, 1.0).unwrap();
    let noise = NoisePath::generate(&problem, 3, 0);
    let cfg = SpectralConfig {
        x_min: -10.0,
        x_max: 10.0,
        ..SpectralConfig::default()
    };
    let exact = exact_bridge_solve(&problem, &Flat::new(1), &noise, &cfg).unwrap();
    let free = free_bridge(&problem, &noise).unwrap();
    let flat = exact
        .as_slice()
        .iter()
        .zip(free.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let ok = eig < 1e-4 && ou < 1e-3 && flat < 1e-3;
    let detail = format!("eigenvalue rel {eig:.2e} (< 1e-4), OU drift {ou:.2e} (< 1e-3), flat bridge {flat:.2e} (< 1e-3)");
    verdict(6, ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_7_mueller_ensemble() {
    let config = RunConfig::defaults(Experiment::Mueller);
    let surface = config.surface();
    let solver = config.solver.solver_config();
    let zero = config.problem(&surface, 0.0).unwrap();
    assert_eq!(zero.steps(), 300);
    let (reference, _) = fixed_point_solve(
        &zero,
        surface.as_dyn(),
        SchemeKind::ZeroTemperature,
        &NoisePath::zeros(&zero),
        &solver,
    )
    .unwrap();

    let mut pinned = true;
    let mut slow = 0usize;
    let mut worst_iterations = 0usize;
    let mut means = Vec::new();
    for &t in &[0.2, 1.0, 2.0] {
        let problem = config.problem(&surface, t).unwrap();
        let members = sample_ensemble(&problem, surface.as_dyn(), config.solver.scheme, &solver, config.seed, 100).unwrap();
        let mut distances = Vec::new();
        for m in &members {
            match m.solved() {
                Some((traj, report)) => {
                    pinned &= traj.point(0) == problem.r_i() && traj.point(problem.steps()) == problem.r_f();
                    if !report.converged || report.iterations > 5000 {
                        slow += 1;
                    }
                    worst_iterations = worst_iterations.max(report.iterations);
                    distances.push(max_distance(traj, &reference));
                }
                None => slow += 1,
            }
        }
        means.push(mean_stderr(&distances).0);
    }
    let increasing = means.windows(2).all(|w| w[1] > w[0]);
    let ok = pinned && slow == 0 && increasing;
    let detail = format!(
        "pinned {pinned}, {slow} members unconverged or over 5000 iterations (max {worst_iterations}), mean max-distance {means:.4?}"
    );
    verdict(7, ok, &detail);
    assert!(ok, "{detail}");
}

fn agree_to_3_digits(a: f64, b: f64) -> bool {
    let unit = 10f64.powf(b.abs().log10().floor() - 2.0);
    (a - b).abs() <= 0.5 * unit
}

#[test]
fn criterion_8_cumulant_quadrature_oracle() {
    let problem = BridgeProblem::new(vec![-1.0], vec![1.0], 3.0, 1e-3, 0.5, 1.0).unwrap();
    let stride = 10;
    let rule = TensorGaussHermite::new(1, 21).unwrap();
    let probes = [
        (-1.2, 0.0),
        (-1.0, 0.5),
        (-0.6, 1.0),
        (-0.3, 1.5),
        (0.0, 0.0),
        (0.3, 2.0),
        (0.6, 2.5),
        (0.9, 1.0),
        (1.2, 2.8),
        (1.5, 0.3),
    ];
    let samples = 1_000_000;
    let d = problem.diffusion();
    let t_f = problem.t_f();
    let h = stride as f64 * problem.dt();
    let mut misses = Vec::new();
    let mut g = [0.0];
    for (i, &(r, t)) in probes.iter().enumerate() {
        let quad = cumulant_drift(&problem, &QuarticWell, &[r], t, &rule, stride).unwrap()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        rng.set_stream(i as u64);
        let span = t_f - t;
        let cells = ((span / h) - 1e-9).ceil().max(1.0) as usize;
        let mut acc = 0.0;
        for j in 0..cells {
            let tau = t + j as f64 * h;
            let (ahead, since) = (t_f - tau, tau - t);
            let mean = (1.0 * since + r * ahead) / span;
            let sigma = (2.0 * d * ahead * since / span).sqrt();
            let mut sum = 0.0;
            for _ in 0..samples {
                let z: f64 = rng.sample(StandardNormal);
                QuarticWell.effective_gradient(&[mean + sigma * z], 0.5, &mut g);
                sum += g[0];
            }
            acc += ahead * ahead.min(h) * sum / samples as f64;
        }
        let mc = -2.0 * acc / span;
        if !agree_to_3_digits(quad, mc) {
            misses.push(format!("(r={r}, t={t}): quadrature {quad:.6} vs MC {mc:.6}"));
        }
    }
    let ok = misses.is_empty();
    let detail = format!("{} of {} probes disagree: {}", misses.len(), probes.len(), misses.join("; "));
    verdict(8, ok, &detail);
    assert!(ok, "{detail}");
}

fn csv_files(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                let key = path.strip_prefix(root).unwrap().display().to_string();
                out.insert(key, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

#[test]
fn criterion_9_cli_runs_are_deterministic() {
    let runs: [&[&str]; 4] = [
        &["quartic-compare", "--temps", "0.5,2", "--pairs", "2", "--tf", "1", "--dt", "0.002"],
        &["mueller", "--temps", "1", "--count", "3"],
        &["instanton", "--dt", "0.01"],
        &["free-bridge", "--count", "5", "--dt", "0.01"],
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for args in runs {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{}_{rep}", args[0]));
            let status = Command::new(env!("CARGO_BIN_EXE_langevin-bridge"))
                .args(args)
                .arg("--seed")
                .arg("9")
                .arg("--out")
                .arg(&out)
                .output()
                .unwrap();
            let code = status.status.code();
            assert!(matches!(code, Some(0) | Some(2)), "{args:?} exited {code:?}: {}", String::from_utf8_lossy(&status.stderr));
            outputs.push(csv_files(&out));
        }
        let same = !outputs[0].is_empty() && outputs[0] == outputs[1];
        ok &= same;
        detail.push(format!("{}: {} csv files identical {same}", args[0], outputs[0].len()));
    }
    let detail = detail.join("; ");
    verdict(9, ok, &detail);
    assert!(ok, "{detail}");
}
