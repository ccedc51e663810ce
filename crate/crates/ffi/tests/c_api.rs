use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use dampwave_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(dw_last_error()) }.to_string_lossy().into_owned()
}

fn damped_params(eps: f64, k: usize) -> *mut DwParams {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(dw_params_capillary(eps, &mut p), DwStatus::DW_OK);
        let s = dw_params_set_cutoff(p, std::f64::consts::FRAC_PI_2, 1.5 * std::f64::consts::PI, 0.4, 1.0, 2 * k);
        assert_eq!(s, DwStatus::DW_OK, "{}", last_error());
    }
    p
}

#[test]
fn field_round_trips_through_buffers() {
    let k = 3;
    let n = dw_coeff_count(k);
    let re: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let im: Vec<f64> = (0..n).map(|i| -(i as f64) / 2.0).collect();
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(dw_field_new(k, re.as_ptr(), im.as_ptr(), &mut f), DwStatus::DW_OK);
        assert_eq!(dw_field_k_max(f), k);
        let (mut r2, mut i2) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(dw_field_coeffs(f, r2.as_mut_ptr(), i2.as_mut_ptr(), n), DwStatus::DW_OK);
        assert_eq!((r2, i2), (re, im));
        let mut short = vec![0.0; n - 1];
        let s = dw_field_coeffs(f, short.as_mut_ptr(), short.as_mut_ptr(), n - 1);
        assert_eq!(s, DwStatus::DW_INVALID_INPUT);
        dw_field_free(f);
    }
}

#[test]
fn non_finite_coefficients_are_rejected() {
    let re = [0.0, f64::NAN, 0.0];
    let im = [0.0; 3];
    let mut f = ptr::null_mut();
    let s = unsafe { dw_field_new(1, re.as_ptr(), im.as_ptr(), &mut f) };
    assert_eq!(s, DwStatus::DW_INVALID_INPUT);
    assert!(f.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_handles_report_instead_of_crashing() {
    let mut e = 0.0;
    unsafe {
        assert_eq!(dw_energy(ptr::null(), ptr::null(), &mut e), DwStatus::DW_NULL_POINTER);
        assert!(last_error().contains("null"));
        assert_eq!(dw_field_k_max(ptr::null()), 0);
        dw_field_free(ptr::null_mut());
        dw_params_free(ptr::null_mut());
        dw_trajectory_free(ptr::null_mut());
    }
}

#[test]
fn bad_parameters_map_to_parameter_status() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { dw_params_capillary(2.0, &mut p) }, DwStatus::DW_PARAMETER);
    assert!(last_error().contains('ε'));
}

#[test]
fn energy_dominates_l2_and_rhs_matches_core() {
    let k = 16;
    let p = damped_params(0.1, k);
    let mut f = ptr::null_mut();
    let mut rhs = ptr::null_mut();
    let mut e = 0.0;
    unsafe {
        assert_eq!(dw_field_random(k, 3.0, 5, &mut f), DwStatus::DW_OK);
        assert_eq!(dw_energy(p, f, &mut e), DwStatus::DW_OK);
        assert_eq!(dw_rhs(p, f, &mut rhs), DwStatus::DW_OK);
        let n = dw_coeff_count(k);
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        dw_field_coeffs(f, re.as_mut_ptr(), im.as_mut_ptr(), n);
        let l2: f64 = re.iter().zip(&im).map(|(a, b)| a * a + b * b).sum();
        assert!(e >= l2 * (1.0 - 1e-12));

        let v = dampwave::spectral::SpectralField::from_coeffs(
            k,
            re.iter().zip(&im).map(|(&a, &b)| dampwave::Complex64::new(a, b)).collect(),
        )
        .unwrap();
        let chi = dampwave::model::CutoffChi::with_amplitude(
            std::f64::consts::FRAC_PI_2,
            1.5 * std::f64::consts::PI,
            0.4,
            1.0,
            2 * k,
        )
        .unwrap();
        let params = dampwave::model::ModelParams::capillary(0.1).with_damper(dampwave::model::Damper::Cutoff(chi));
        let want = dampwave::model::rhs(&v, &params).unwrap();
        dw_field_coeffs(rhs, re.as_mut_ptr(), im.as_mut_ptr(), n);
        for (i, c) in want.coeffs().iter().enumerate() {
            assert_eq!((re[i], im[i]), (c.re, c.im));
        }
        dw_field_free(rhs);
        dw_field_free(f);
        dw_params_free(p);
    }
}

#[test]
fn simulation_damps_linear_l2() {
    let k = 16;
    let p = damped_params(0.1, k);
    let mut f = ptr::null_mut();
    let mut traj = ptr::null_mut();
    unsafe {
        assert_eq!(dw_params_set_transport(p, 0), DwStatus::DW_OK);
        dw_field_random(k, 3.0, 1, &mut f);
        assert_eq!(dw_simulate(p, f, 1e-3, 0.1, 0.1, 10, &mut traj), DwStatus::DW_OK);
        let n = dw_trajectory_len(traj);
        assert_eq!(n, 11);
        let mut times = vec![0.0; n];
        let mut l2 = vec![0.0; n];
        dw_trajectory_series(traj, DwSeries::DW_TIMES, times.as_mut_ptr(), n);
        dw_trajectory_series(traj, DwSeries::DW_L2_NORM, l2.as_mut_ptr(), n);
        assert!((times[n - 1] - 0.1).abs() < 1e-12);
        assert!(l2.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let mut last = ptr::null_mut();
        assert_eq!(dw_trajectory_final_state(traj, &mut last), DwStatus::DW_OK);
        assert_eq!(dw_field_k_max(last), k);
        dw_field_free(last);
        dw_trajectory_free(traj);
        dw_field_free(f);
        dw_params_free(p);
    }
}

#[test]
fn run_config_reports_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = CString::new(tmp.path().to_str().unwrap()).unwrap();
    let mut code = -1;
    let good = CString::new("experiment = oracle-check\nsamples = 2\n").unwrap();
    let s = unsafe { dw_run_config(good.as_ptr(), dir.as_ptr(), &mut code) };
    assert_eq!((s, code), (DwStatus::DW_OK, 0));
    assert!(tmp.path().join("summary.json").exists());

    let bad = CString::new("no_such_key = 1\n").unwrap();
    let s = unsafe { dw_run_config(bad.as_ptr(), dir.as_ptr(), &mut code) };
    assert_eq!((s, code), (DwStatus::DW_CONFIG, 2));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/dampwave.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["dw_simulate", "dw_run_config", "dw_last_error", "DW_BLOW_UP", "typedef struct DwField DwField"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("probe.c");
    std::fs::write(&src, format!("#include \"{header}\"\nint main(void) {{ return dw_coeff_count(0) == 1 ? DW_OK : DW_PANIC; }}\n")).unwrap();
    match Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"]).arg(&src).status() {
        Ok(status) => assert!(status.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler; header syntax not checked"),
    }
}
