use std::f64::consts::PI;

use dampwave::generate::Generator;
use dampwave::harness::experiments::{linear_run, quotient_study};
use dampwave::harness::{Experiment, RunConfig};
use dampwave::integrator::{lifespan_probe, simulate, LifespanCause, StepperConfig, TrajectoryRecord};
use dampwave::model::{CutoffChi, CutoffGeometry, Damper, ModelParams};

/// Undamped single-mode data `a e^{ix}`: growth comes from the `W ∂ₓ`
/// coupling of modes 1 and 2, and to leading order `‖U‖_σ` first doubles
/// at `T = 2√3·⟨1⟩^{N+2σ}/ε = 64√3/ε` for N = 4, σ = 3.
#[test]
fn mode_one_lifespan_matches_closed_form() {
    let params = ModelParams::capillary(1.0).with_damper(Damper::Off);
    let profile = Generator::Mode { wavenumber: 1 }.generate(32, params.sigma, 0).unwrap();
    let stepper = StepperConfig {
        dt: 0.1,
        ..Default::default()
    };
    let bracket = 2f64.sqrt().powi(4 + 6);
    let want = 2.0 * 3f64.sqrt() * bracket;
    assert!((want - 64.0 * 3f64.sqrt()).abs() < 1e-12);
    for eps in [0.05, 0.025] {
        let r = lifespan_probe(&params, &profile, eps, 2.0, 1e4, &stepper).unwrap();
        assert_eq!(r.cause, LifespanCause::Threshold);
        let rel = (r.time_times_eps - want).abs() / want;
        assert!(rel < 0.02, "ε = {eps}: T·ε = {} vs {want}", r.time_times_eps);
    }
}

fn series(rec: &TrajectoryRecord) -> Vec<(&'static str, &[f64])> {
    vec![
        ("l2_norm", &rec.l2_norm),
        ("sob_sigma_norm", &rec.sob_sigma_norm),
        ("energy", &rec.energy),
        ("energy_damping", &rec.energy_damping),
        ("energy_transport", &rec.energy_transport),
        ("dissipation", &rec.dissipation),
        ("transport", &rec.transport),
    ]
}

/// Largest change of each recorded series, relative to the series' size,
/// when every step of a standard run is halved.
fn halving_change(experiment: Experiment, eps_values: Option<Vec<f64>>) -> f64 {
    let mut cfg = RunConfig::defaults(experiment);
    if let Some(e) = eps_values {
        cfg.study.eps_values = e;
    }
    let mut fine = cfg.clone();
    fine.stepper.safety /= 2.0;
    fine.stepper.dt /= 2.0;
    fine.stepper.stride *= 2;
    let linear = matches!(experiment, Experiment::LinearDecay);
    let runs = |c: &RunConfig| -> Vec<TrajectoryRecord> {
        if linear {
            vec![linear_run(c).unwrap().1]
        } else {
            quotient_study(c, true).unwrap().records.into_iter().map(|(_, _, r)| r).collect()
        }
    };
    let mut worst = 0.0f64;
    for (a, b) in runs(&cfg).iter().zip(&runs(&fine)) {
        assert_eq!(a.times, b.times);
        for ((name, x), (_, y)) in series(a).into_iter().zip(series(b)) {
            let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = x.iter().zip(y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            let rel = if scale > 0.0 { diff / scale } else { diff };
            assert!(rel.is_finite(), "{experiment:?} {name}");
            worst = worst.max(rel);
        }
    }
    worst
}

#[test]
fn halving_the_step_leaves_standard_runs_unchanged() {
    for (experiment, eps) in [
        (Experiment::LinearDecay, None),
        (Experiment::NonlinearL2, Some(vec![0.1])),
        (Experiment::EnergyGrav, Some(vec![0.1])),
        (Experiment::EnergyCap, Some(vec![0.1])),
    ] {
        let change = halving_change(experiment, eps);
        assert!(change < 1e-6, "{experiment:?}: {change:e}");
    }
}

#[test]
fn packet_decays_under_the_sponge() {
    // A packet placed inside the plateau of χ loses L² mass at rate ≈ 2/ε.
    let k = 64;
    let chi = CutoffChi::from_geometry(CutoffGeometry::default(), k).unwrap();
    let params = ModelParams::capillary(0.1)
        .with_damper(Damper::Cutoff(chi))
        .with_transport(false);
    let packet = dampwave::generate::WavePacket {
        center: PI,
        width: 0.15,
        wavenumber: 0.0,
        phase: 0.0,
    };
    let v0 = packet.field(k, 0.0).unwrap();
    let stepper = StepperConfig {
        dt: 1e-4,
        t_end: 1e-3,
        ..Default::default()
    };
    let rec = simulate(&v0, &params, &stepper).unwrap();
    let n = rec.l2_norm.len();
    let rate = (rec.l2_norm[n - 1] / rec.l2_norm[0]).ln() / rec.times[n - 1];
    assert!((rate + 1.0 / params.eps).abs() < 0.05 / params.eps, "rate {rate}");
}
