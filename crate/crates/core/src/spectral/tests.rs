use super::*;
use crate::potentials::{Flat, Harmonic, QuarticWell};
use crate::trajectory::{free_bridge, make_noise};

fn config(x_min: f64, x_max: f64, m: usize) -> SpectralConfig {
    SpectralConfig {
        x_min,
        x_max,
        grid_points: m,
        ..SpectralConfig::default()
    }
}

/// Points a bridge ending at `x_f` typically visits with `s` remaining.
fn probes(x_f: f64, diffusion: f64, s: f64) -> Vec<f64> {
    let width = (2.0 * diffusion * s).sqrt().min(0.4);
    [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|c| x_f + c * width).collect()
}

fn ou_drift(theta: f64, x: f64, x_f: f64, s: f64) -> f64 {
    let e = (-theta * s).exp();
    -theta * x + 2.0 * theta * e * (x_f - x * e) / (1.0 - e * e)
}

#[test]
fn harmonic_spectrum_is_equally_spaced() {
    for &(t, gamma) in &[(1.0, 1.0), (0.5, 1.0), (1.0, 2.0)] {
        let d: f64 = t / gamma;
        let half = 12.0 * (d * t).sqrt();
        let model = build_model(&Harmonic::new(1, 1.0), t, gamma, &config(-half, half, 2048)).unwrap();
        assert!(model.orthonormality_residual() < 1e-8);
        let e = model.eigenvalues();
        assert!(e[0].abs() < 1e-4, "E0 = {}", e[0]);
        for n in 1..=5 {
            let exact = n as f64 / gamma;
            assert!(((e[n] - exact) / exact).abs() < 1e-4, "T={t} γ={gamma} E{n} = {}", e[n]);
        }
    }
}

#[test]
fn eigenvalues_sorted_and_vectors_orthonormal() {
    let cfg = SpectralConfig {
        grid_points: 256,
        ..SpectralConfig::default()
    };
    let model = build_model(&QuarticWell, 0.5, 1.0, &cfg).unwrap();
    assert!(model.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    assert!(model.orthonormality_residual() < 1e-8);
    for n in [0, 1, 2, 10, 100, 255] {
        let e = model.eigenvalues()[n];
        let rq = model.rayleigh_quotient(n);
        assert!((rq - e).abs() <= 1e-8 * e.abs().max(1.0), "n={n}: {rq} vs {e}");
    }
}

#[test]
fn free_particle_ground_state_near_zero() {
    let model = build_model(&Flat::new(1), 1.0, 1.0, &config(-50.0, 50.0, 512)).unwrap();
    assert!(model.eigenvalues()[0] > 0.0);
    assert!(model.eigenvalues()[0] < 1e-3);
}

#[test]
fn quartic_low_temperature_gap() {
    let t = 0.05;
    let coarse = build_model(&QuarticWell, t, 1.0, &SpectralConfig::default()).unwrap();
    let fine = spectrum(
        &QuarticWell,
        t,
        1.0,
        &SpectralConfig {
            grid_points: 8192,
            ..SpectralConfig::default()
        },
    )
    .unwrap();
    let e = coarse.eigenvalues();
    let gap = e[1] - e[0];
    let fine_gap = fine[1] - fine[0];
    assert!(gap > 0.0);
    assert!(gap < 0.01 * (e[2] - e[1]), "gap {gap} vs {}", e[2] - e[1]);
    assert!(fine[0].abs() < 1e-6, "fine E0 = {}", fine[0]);
    assert!(e[0].abs() < 1e-4, "E0 = {}", e[0]);
    assert!(((gap - fine_gap) / fine_gap).abs() < 1e-2, "gap {gap} vs fine {fine_gap}");
}

#[test]
fn ou_bridge_drift_matches_closed_form() {
    for &(theta, t) in &[(1.0, 1.0), (1.0, 0.5), (2.0, 0.5)] {
        let half = 12.0 * t;
        let model = build_model(&Harmonic::new(1, theta), t, 1.0, &config(-half, half, 2048)).unwrap();
        let x_f = 0.8;
        let kernel = BridgeKernel::new(&model, x_f, 0.0).unwrap();
        for &s in &[0.01, 0.05, 0.2, 0.7, 1.5, 3.0] {
            let e = (-theta * s).exp();
            let spread = (t / theta * (1.0 - e * e)).sqrt();
            for c in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                let x = x_f * e + c * spread;
                let got = kernel.drift_with_modes(x, s, kernel.modes_at(s)).unwrap();
                let want = ou_drift(theta, x, x_f, s);
                assert!(
                    (got - want).abs() < 1e-3 * want.abs().max(1.0),
                    "θ={theta} T={t} x={x} s={s}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn flat_drift_is_free_bridge_drift() {
    let model = build_model(&Flat::new(1), 0.5, 1.0, &config(-10.0, 10.0, 1024)).unwrap();
    let kernel = BridgeKernel::new(&model, 1.0, 0.0).unwrap();
    for &s in &[0.1, 0.5, 1.0] {
        for &x in &[-1.0, 0.0, 0.5] {
            let free = (1.0 - x) / s;
            let got = kernel.drift(x, 0.0, s).unwrap();
            assert!(((got - free) / free).abs() < 1e-2, "x={x} s={s}: {got} vs {free}");
        }
    }
}

#[test]
fn drift_switches_to_free_limit() {
    let model = build_model(&QuarticWell, 0.5, 1.0, &SpectralConfig::default()).unwrap();
    let kernel = BridgeKernel::new(&model, 1.0, 0.01).unwrap();
    let got = kernel.drift(0.9, 2.995, 3.0).unwrap();
    assert!((got - 0.1 / (3.0 - 2.995)).abs() < 1e-12);
    assert!(matches!(kernel.drift(0.9, 3.0, 3.0), Err(BridgeError::PastHorizon { .. })));
}

#[test]
fn barrier_point_drift_points_to_target() {
    for &t in &[0.05, 0.5, 2.0] {
        let problem = BridgeProblem::new(vec![-1.0], vec![1.0], 3.0, 1e-3, t, 1.0).unwrap();
        let cfg = SpectralConfig::default();
        let model = build_model(&QuarticWell, t, 1.0, &cfg).unwrap();
        let drift = bridge_drift(&model, 0.0, 0.0, &problem, &cfg).unwrap();
        assert!(drift > 0.0, "T={t}: drift {drift}");
    }
}

#[test]
fn grid_doubling_changes_drift_little() {
    for &t in &[0.05, 0.5, 2.0] {
        let problem = BridgeProblem::new(vec![-1.0], vec![1.0], 3.0, 1e-3, t, 1.0).unwrap();
        let coarse = ExactBridge::new(&problem, &QuarticWell, &config(-3.0, 3.0, 2048)).unwrap();
        let fine = ExactBridge::new(&problem, &QuarticWell, &config(-3.0, 3.0, 4096)).unwrap();
        let path = coarse.solve(&make_noise(&problem, 11)).unwrap();
        let ka = BridgeKernel::new(coarse.model(), 1.0, 0.0).unwrap();
        let kb = BridgeKernel::new(fine.model(), 1.0, 0.0).unwrap();
        for k in (0..problem.steps() - 10).step_by(7) {
            let x = path.point(k)[0];
            let s = problem.remaining(k);
            let da = ka.drift_with_modes(x, s, ka.modes_at(s)).unwrap();
            let db = kb.drift_with_modes(x, s, kb.modes_at(s)).unwrap();
            assert!((da - db).abs() < 1e-4, "T={t} x={x} s={s}: {da} vs {db}");
        }
    }
}

#[test]
fn mode_truncation_is_negligible() {
    let model = build_model(&QuarticWell, 0.5, 1.0, &SpectralConfig::default()).unwrap();
    let kernel = BridgeKernel::new(&model, 1.0, 0.0).unwrap();
    for &s in &[0.01, 0.1, 1.0] {
        let kept = kernel.modes_at(s);
        assert!(kept < model.modes());
        for x in probes(1.0, 0.5, s) {
            let a = kernel.drift_with_modes(x, s, kept).unwrap();
            let b = kernel.drift_with_modes(x, s, model.modes()).unwrap();
            assert!((a - b).abs() < 1e-10, "s={s} x={x}: {a} vs {b}");
        }
    }
}

#[test]
fn exact_bridge_keeps_only_contributing_modes() {
    let problem = BridgeProblem::new(vec![-1.0], vec![1.0], 3.0, 1e-3, 0.5, 1.0).unwrap();
    let bridge = ExactBridge::new(&problem, &QuarticWell, &SpectralConfig::default()).unwrap();
    let model = bridge.model();
    let e = model.eigenvalues();
    assert!(model.modes() < 2048);
    assert!((e[model.modes() - 1] - e[0]) * 0.01 <= MODE_CUTOFF);
    assert!(model.orthonormality_residual() < 1e-8);
}

#[test]
fn simplified_drift_matches_unsimplified() {
    let model = build_model(&QuarticWell, 0.5, 1.0, &SpectralConfig::default()).unwrap();
    let kernel = BridgeKernel::new(&model, 1.0, 0.0).unwrap();
    for &s in &[0.05, 0.5, 2.0] {
        for x in probes(1.0, 0.5, s) {
            let a = kernel.drift_with_modes(x, s, kernel.modes_at(s)).unwrap();
            let b = kernel.drift_unsimplified(&QuarticWell, x, s).unwrap();
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn flat_exact_bridge_matches_free_bridge() {
    let problem = BridgeProblem::new(vec![-1.0], vec![1.0], 3.0, 1e-3, 0.5, 1.0).unwrap();
    let cfg = config(-10.0, 10.0, 1024);
    let noise = make_noise(&problem, 7);
    let exact = exact_bridge_solve(&problem, &Flat::new(1), &noise, &cfg).unwrap();
    let free = free_bridge(&problem, &noise).unwrap();
    let dev = exact
        .as_slice()
        .iter()
        .zip(free.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-3, "max deviation {dev}");
    assert_eq!(exact.point(problem.steps()), &[1.0]);
}

#[test]
fn endpoint_near_boundary_rejected() {
    let problem = BridgeProblem::new(vec![-1.0], vec![2.5], 3.0, 1e-3, 0.5, 1.0).unwrap();
    let err = ExactBridge::new(&problem, &QuarticWell, &SpectralConfig::default()).unwrap_err();
    assert!(matches!(err, BridgeError::DomainTooSmall { .. }));
}

#[test]
fn invalid_models_rejected() {
    let cfg = SpectralConfig::default();
    assert!(build_model(&QuarticWell, 0.0, 1.0, &cfg).is_err());
    assert!(build_model(&Flat::new(2), 1.0, 1.0, &cfg).is_err());
    let small = SpectralConfig {
        grid_points: 32,
        ..cfg
    };
    assert!(matches!(build_model(&QuarticWell, 1.0, 1.0, &small), Err(BridgeError::InvalidConfig(_))));
}

#[test]
fn exiting_trajectory_reports_step() {
    let problem = BridgeProblem::new(vec![-0.5], vec![0.5], 1.0, 1e-2, 4.0, 1.0).unwrap();
    let cfg = config(-2.0, 2.0, 64);
    let bridge = ExactBridge::new(&problem, &Flat::new(1), &cfg).unwrap();
    let mut noise = make_noise(&problem, 1);
    // a huge kick right away
    let mut xi = noise.as_slice().to_vec();
    xi[0] = 50.0;
    noise = NoisePath::from_raw(&problem, xi).unwrap();
    assert!(matches!(bridge.solve(&noise), Err(BridgeError::ExitedDomain { .. })));
}
