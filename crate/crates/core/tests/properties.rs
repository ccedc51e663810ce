use proptest::prelude::*;

use dampwave::commutator::{
    commutator_l_f, commutator_pl_dx, commutator_pl_f, dense_operator, FunctionEnv, OperatorExpr,
};
use dampwave::harness::{emit_config, parse_config, Experiment, RunConfig};
use dampwave::model::{apply_pl, energy, CutoffChi, CutoffGeometry, Damper, EnergyFlavor, ModelParams};
use dampwave::spectral::{analyze, synthesize, SpectralField};
use dampwave::Complex64;

fn field(k_max: usize) -> impl Strategy<Value = SpectralField> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * k_max + 1).prop_map(move |c| {
        SpectralField::from_coeffs(k_max, c.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).unwrap()
    })
}

fn real_field(k_max: usize) -> impl Strategy<Value = SpectralField> {
    field(k_max).prop_map(|f| f.real_part())
}

fn damper(k: usize) -> Damper {
    Damper::Cutoff(CutoffChi::from_geometry(CutoffGeometry::default(), k).unwrap())
}

fn close(a: &SpectralField, b: &SpectralField, tol: f64) -> bool {
    a.max_abs_diff(b) <= tol * b.max_abs().max(a.max_abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_round_trip(u in field(12), extra in 0usize..40) {
        let m = 2 * 12 + 1 + extra;
        let back = analyze(&synthesize(&u, m).unwrap(), 12).unwrap();
        prop_assert!(close(&back, &u, 1e-13));
        let grid_energy: f64 = synthesize(&u, m).unwrap().iter().map(|s| s.norm_sqr()).sum::<f64>() / m as f64;
        prop_assert!((grid_energy - u.norm_sq()).abs() <= 1e-12 * u.norm_sq().max(1.0));
    }

    #[test]
    fn pl_is_linear(u in field(10), w in field(10), a in -2.0f64..2.0, b in -2.0f64..2.0, alpha in 0.1f64..2.0) {
        let d = damper(10);
        let combo = &(&u * a) + &(&w * b);
        let lhs = apply_pl(&combo, &d, alpha, true);
        let rhs = &(&apply_pl(&u, &d, alpha, true) * a) + &(&apply_pl(&w, &d, alpha, true) * b);
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn commutators_are_bilinear(
        u in field(8), w in field(8), f in real_field(8), g in real_field(8),
        a in -2.0f64..2.0, k in 1usize..=4,
    ) {
        let d = damper(8);
        let alpha = 1.5;
        let uw = &(&u * a) + &w;
        let lhs = commutator_pl_f(&uw, &f, &d, alpha, k);
        let rhs = &(&commutator_pl_f(&u, &f, &d, alpha, k) * a) + &commutator_pl_f(&w, &f, &d, alpha, k);
        prop_assert!(close(&lhs, &rhs, 1e-12));
        let fg = &(&f * a) + &g;
        let lhs = commutator_l_f(&u, &fg, alpha);
        let rhs = &(&commutator_l_f(&u, &f, alpha) * a) + &commutator_l_f(&u, &g, alpha);
        prop_assert!(close(&lhs, &rhs, 1e-12));
        let lhs = commutator_pl_dx(&uw, &d, alpha, k);
        let rhs = &(&commutator_pl_dx(&u, &d, alpha, k) * a) + &commutator_pl_dx(&w, &d, alpha, k);
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn spectral_commutators_match_dense(u in field(12), f in real_field(12), k in 1usize..=4, alpha in 0.2f64..2.0) {
        let d = damper(12);
        let mut env = FunctionEnv::new().with_damper(&d, 12);
        env.insert("f", f.clone());
        let pk = OperatorExpr::power(OperatorExpr::pl(alpha), k);
        let dense = dense_operator(&OperatorExpr::commutator(pk.clone(), OperatorExpr::multiply("f")), 12, &env).unwrap();
        prop_assert!(close(&commutator_pl_f(&u, &f, &d, alpha, k), &dense.apply(&u), 1e-10));
        let dense = dense_operator(&OperatorExpr::commutator(pk, OperatorExpr::Dx), 12, &env).unwrap();
        prop_assert!(close(&commutator_pl_dx(&u, &d, alpha, k), &dense.apply(&u), 1e-10));
    }

    #[test]
    fn energies_are_non_negative(u in field(10), eps in 0.01f64..1.0) {
        for flavor in EnergyFlavor::ALL {
            let base = if flavor == EnergyFlavor::GravPl { ModelParams::gravity(eps) } else { ModelParams::capillary(eps) };
            let p = base.with_damper(damper(10)).with_flavor(flavor);
            let e = energy(&u, &p).unwrap();
            prop_assert!(e >= u.norm_sq() * (1.0 - 1e-12));
        }
    }

    #[test]
    fn config_round_trips(
        idx in 0usize..Experiment::ALL.len(),
        seed in any::<u64>(),
        eps in 0.001f64..1.0,
        dt in 1e-5f64..1.0,
        eps_values in prop::collection::vec(0.001f64..1.0, 1..5),
        amplitude in 0.0f64..5.0,
        dealias in any::<bool>(),
    ) {
        let mut cfg = RunConfig::defaults(Experiment::ALL[idx]);
        cfg.seed = seed;
        cfg.model.eps = eps;
        cfg.model.dealias = dealias;
        cfg.model.cutoff.amplitude = amplitude;
        cfg.stepper.dt = dt;
        cfg.study.eps_values = eps_values;
        prop_assume!(cfg.validate().is_ok());
        let parsed = parse_config(&emit_config(&cfg)).unwrap();
        prop_assert_eq!(&parsed.config, &cfg);
        prop_assert!(parsed.defaulted.iter().all(|k| k == "param" || k == "values"));
    }
}
