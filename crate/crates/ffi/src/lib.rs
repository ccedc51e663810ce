//! C interface to the dampwave simulator.
//!
//! Objects cross the boundary as opaque handles created by `dw_*_new`-style
//! constructors and released with the matching `dw_*_free`. Every fallible
//! call returns a [`DwStatus`]; on failure `dw_last_error()` describes it.
//! Panics never unwind into C: they are caught and reported as `DW_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use dampwave::generate::{random_data, rng};
use dampwave::harness::{parse_config, run};
use dampwave::integrator::{simulate, StepperConfig, Termination, TrajectoryRecord};
use dampwave::model::{self, CutoffChi, Damper, ModelParams};
use dampwave::spectral::SpectralField;
use dampwave::{Complex64, Error};

/// Result of every fallible call.
#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DwStatus {
    DW_OK = 0,
    DW_NULL_POINTER = 1,
    DW_INVALID_INPUT = 2,
    DW_PARAMETER = 3,
    DW_NON_FINITE = 4,
    DW_BLOW_UP = 5,
    DW_CONFIG = 6,
    DW_IO = 7,
    DW_PANIC = 8,
}

/// Diagnostic series stored in a trajectory.
#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DwSeries {
    DW_TIMES = 0,
    DW_L2_NORM = 1,
    DW_SOBOLEV_NORM = 2,
    DW_ENERGY = 3,
    DW_DISSIPATION = 4,
    DW_TRANSPORT = 5,
}

/// Fourier coefficients for wavenumbers `-K..=K`.
pub struct DwField(SpectralField);

/// Model parameters, including the damper.
pub struct DwParams(ModelParams);

/// Sampled diagnostics and final state of one simulation.
pub struct DwTrajectory(TrajectoryRecord);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> DwStatus {
    match e {
        Error::InvalidInput(_) | Error::Aliasing { .. } | Error::ResolutionMismatch(..) | Error::Format(_) => {
            DwStatus::DW_INVALID_INPUT
        }
        Error::Parameter(_) | Error::Inadmissible { .. } | Error::UndefinedFunction(_) => DwStatus::DW_PARAMETER,
        Error::NonFinite(_) => DwStatus::DW_NON_FINITE,
        Error::BlowUp { .. } => DwStatus::DW_BLOW_UP,
        Error::Config { .. } => DwStatus::DW_CONFIG,
        Error::Io(_) | Error::Json(_) => DwStatus::DW_IO,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), DwStatus>) -> DwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DwStatus::DW_OK,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            DwStatus::DW_PANIC
        }
    }
}

fn check<T>(r: dampwave::Result<T>) -> Result<T, DwStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, DwStatus> {
    p.as_ref().ok_or_else(|| {
        set_error(format!("{what} is null"));
        DwStatus::DW_NULL_POINTER
    })
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, DwStatus> {
    p.as_mut().ok_or_else(|| {
        set_error(format!("{what} is null"));
        DwStatus::DW_NULL_POINTER
    })
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), DwStatus> {
    let out = get_mut(out, "output pointer")?;
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], DwStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    Ok(std::slice::from_raw_parts(get(p, what)?, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], DwStatus> {
    if len == 0 {
        return Ok(&mut []);
    }
    Ok(std::slice::from_raw_parts_mut(get_mut(p, what)?, len))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, DwStatus> {
    let p = get(p, what)?;
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        DwStatus::DW_INVALID_INPUT
    })
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Number of coefficients for truncation `K`, i.e. `2K + 1`.
#[no_mangle]
pub extern "C" fn dw_coeff_count(k_max: usize) -> usize {
    2 * k_max + 1
}

/// Builds a field from `2K + 1` real and imaginary parts ordered `k = -K..K`.
#[no_mangle]
pub unsafe extern "C" fn dw_field_new(k_max: usize, re: *const f64, im: *const f64, out: *mut *mut DwField) -> DwStatus {
    guard(|| {
        let n = 2 * k_max + 1;
        let (re, im) = (slice(re, n, "re")?, slice(im, n, "im")?);
        let coeffs = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let field = check(SpectralField::from_coeffs(k_max, coeffs))?;
        put(out, DwField(field))
    })
}

/// Random data with `⟨k⟩^{-σ-0.55}` Gaussian coefficients, unit `H^σ` norm.
#[no_mangle]
pub unsafe extern "C" fn dw_field_random(k_max: usize, sigma: f64, seed: u64, out: *mut *mut DwField) -> DwStatus {
    guard(|| {
        if k_max == 0 || !sigma.is_finite() {
            set_error("random data needs K ≥ 1 and finite σ");
            return Err(DwStatus::DW_INVALID_INPUT);
        }
        put(out, DwField(random_data(k_max, sigma, &mut rng(seed, 0))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn dw_field_k_max(field: *const DwField) -> usize {
    field.as_ref().map_or(0, |f| f.0.k_max())
}

/// Copies the coefficients out; `len` must be at least `2K + 1`.
#[no_mangle]
pub unsafe extern "C" fn dw_field_coeffs(field: *const DwField, re: *mut f64, im: *mut f64, len: usize) -> DwStatus {
    guard(|| {
        let f = &get(field, "field")?.0;
        if len < f.len() {
            set_error(format!("buffer holds {len} coefficients, field has {}", f.len()));
            return Err(DwStatus::DW_INVALID_INPUT);
        }
        let (re, im) = (slice_mut(re, f.len(), "re")?, slice_mut(im, f.len(), "im")?);
        for (i, c) in f.coeffs().iter().enumerate() {
            re[i] = c.re;
            im[i] = c.im;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dw_field_free(field: *mut DwField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Capillary preset: α = 3/2, σ = 3, no damper.
#[no_mangle]
pub unsafe extern "C" fn dw_params_capillary(eps: f64, out: *mut *mut DwParams) -> DwStatus {
    guard(|| {
        let p = ModelParams::capillary(eps);
        check(p.validate())?;
        put(out, DwParams(p))
    })
}

/// Gravity preset: α = 1/2, σ = 2, no damper.
#[no_mangle]
pub unsafe extern "C" fn dw_params_gravity(eps: f64, out: *mut *mut DwParams) -> DwStatus {
    guard(|| {
        let p = ModelParams::gravity(eps);
        check(p.validate())?;
        put(out, DwParams(p))
    })
}

/// Installs the smooth cutoff supported on `[a, b]` with ramps of width
/// `delta`, resolved to wavenumber `k_work`.
#[no_mangle]
pub unsafe extern "C" fn dw_params_set_cutoff(
    params: *mut DwParams,
    a: f64,
    b: f64,
    delta: f64,
    amplitude: f64,
    k_work: usize,
) -> DwStatus {
    guard(|| {
        let p = &mut get_mut(params, "params")?.0;
        p.damper = Damper::Cutoff(check(CutoffChi::with_amplitude(a, b, delta, amplitude, k_work))?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dw_params_set_transport(params: *mut DwParams, on: c_int) -> DwStatus {
    guard(|| {
        get_mut(params, "params")?.0.transport = on != 0;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dw_params_free(params: *mut DwParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// `∂ₜv` of the rescaled equation.
#[no_mangle]
pub unsafe extern "C" fn dw_rhs(params: *const DwParams, field: *const DwField, out: *mut *mut DwField) -> DwStatus {
    guard(|| {
        let p = &get(params, "params")?.0;
        let v = &get(field, "field")?.0;
        put(out, DwField(check(model::rhs(v, p))?))
    })
}

/// Energy of the flavor selected by the parameters.
#[no_mangle]
pub unsafe extern "C" fn dw_energy(params: *const DwParams, field: *const DwField, out: *mut f64) -> DwStatus {
    guard(|| {
        let p = &get(params, "params")?.0;
        let v = &get(field, "field")?.0;
        let e = check(model::energy(v, p))?;
        *get_mut(out, "output pointer")? = e;
        Ok(())
    })
}

/// Integrates to `t_end` with Lawson RK4 and step `min(dt, safety·ε)`,
/// sampling every `stride` steps. A blow-up returns `DW_BLOW_UP` and still
/// hands back the truncated trajectory.
#[no_mangle]
pub unsafe extern "C" fn dw_simulate(
    params: *const DwParams,
    initial: *const DwField,
    dt: f64,
    safety: f64,
    t_end: f64,
    stride: usize,
    out: *mut *mut DwTrajectory,
) -> DwStatus {
    guard(|| {
        let p = &get(params, "params")?.0;
        let v0 = &get(initial, "initial field")?.0;
        let stepper = StepperConfig {
            dt,
            safety,
            t_end,
            stride,
            ..Default::default()
        };
        let rec = check(simulate(v0, p, &stepper))?;
        let blown = match rec.termination {
            Termination::Nonfinite { time } => Some(time),
            _ => None,
        };
        put(out, DwTrajectory(rec))?;
        match blown {
            Some(time) => {
                set_error(format!("numerical blow-up at t = {time}"));
                Err(DwStatus::DW_BLOW_UP)
            }
            None => Ok(()),
        }
    })
}

/// Number of samples in each series.
#[no_mangle]
pub unsafe extern "C" fn dw_trajectory_len(traj: *const DwTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Copies one series; `len` must be at least `dw_trajectory_len`.
#[no_mangle]
pub unsafe extern "C" fn dw_trajectory_series(traj: *const DwTrajectory, which: DwSeries, out: *mut f64, len: usize) -> DwStatus {
    guard(|| {
        let rec = &get(traj, "trajectory")?.0;
        let series = match which {
            DwSeries::DW_TIMES => &rec.times,
            DwSeries::DW_L2_NORM => &rec.l2_norm,
            DwSeries::DW_SOBOLEV_NORM => &rec.sob_sigma_norm,
            DwSeries::DW_ENERGY => &rec.energy,
            DwSeries::DW_DISSIPATION => &rec.dissipation,
            DwSeries::DW_TRANSPORT => &rec.transport,
        };
        if len < series.len() {
            set_error(format!("buffer holds {len} samples, trajectory has {}", series.len()));
            return Err(DwStatus::DW_INVALID_INPUT);
        }
        slice_mut(out, series.len(), "output buffer")?.copy_from_slice(series);
        Ok(())
    })
}

/// The state at the last completed step, as a new field.
#[no_mangle]
pub unsafe extern "C" fn dw_trajectory_final_state(traj: *const DwTrajectory, out: *mut *mut DwField) -> DwStatus {
    guard(|| {
        let rec = &get(traj, "trajectory")?.0;
        let state = rec.final_state.clone().ok_or_else(|| {
            set_error("trajectory has no final state");
            DwStatus::DW_INVALID_INPUT
        })?;
        put(out, DwField(state))
    })
}

#[no_mangle]
pub unsafe extern "C" fn dw_trajectory_free(traj: *mut DwTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Runs one harness experiment from config text, writing its outputs under
/// `out_dir`. `exit_code` receives the CLI exit code (0 pass, 1 verdict
/// failure, 2 usage error, 3 blow-up); the status reports only whether the
/// run could be attempted at all.
#[no_mangle]
pub unsafe extern "C" fn dw_run_config(config: *const c_char, out_dir: *const c_char, exit_code: *mut c_int) -> DwStatus {
    guard(|| {
        let config = text(config, "config")?;
        let dir = text(out_dir, "out_dir")?;
        let code = get_mut(exit_code, "exit_code")?;
        let summary = match parse_config(config) {
            Ok(parsed) => run(&parsed, Path::new(dir)),
            Err(e) => {
                *code = 2;
                set_error(e.to_string());
                return Err(status_of(&e));
            }
        };
        *code = summary.exit_code;
        if let Some(cause) = &summary.cause {
            set_error(cause.clone());
        }
        Ok(())
    })
}

