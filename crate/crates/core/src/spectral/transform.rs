//! Uniform-grid transforms between samples and Fourier coefficients.
//!
//! Convention: `û_k = (1/M) Σ_j u(x_j) e^{-ikx_j}` with `x_j = 2πj/M`, so the
//! discrete Parseval identity carries no weights.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::SpectralField;
use crate::error::{Error, Result};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    planner()
        .lock()
        .expect("fft planner poisoned")
        .plan_fft_forward(n)
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    planner()
        .lock()
        .expect("fft planner poisoned")
        .plan_fft_inverse(n)
}

/// Smallest 5-smooth integer `≥ n`.
pub fn fft_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Grid points `x_j = 2πj/M`.
pub fn grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect()
}

#[inline]
fn bin(k: i64, m: usize) -> usize {
    k.rem_euclid(m as i64) as usize
}

/// Coefficients `|k| ≤ k_max` of the trigonometric interpolant of `samples`.
pub fn analyze(samples: &[Complex64], k_max: usize) -> Result<SpectralField> {
    let m = samples.len();
    if m < 2 * k_max + 1 {
        return Err(Error::Aliasing { samples: m, k_max });
    }
    if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample".into()));
    }
    let mut buf = samples.to_vec();
    forward_plan(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    Ok(SpectralField::from_fn(k_max, |k| buf[bin(k, m)] * scale))
}

/// Samples `Σ_k û_k e^{ikx_j}` on an `m`-point grid. Refuses grids too
/// coarse to hold the band.
pub fn synthesize(field: &SpectralField, m: usize) -> Result<Vec<Complex64>> {
    if m < 2 * field.k_max() + 1 {
        return Err(Error::Aliasing {
            samples: m,
            k_max: field.k_max(),
        });
    }
    Ok(synthesize_unchecked(field, m))
}

/// Grid values of `field` on `m` points, allowing `m` below `2K+1` only
/// when the field vanishes outside what the grid can carry. Internal use.
pub(crate) fn synthesize_unchecked(field: &SpectralField, m: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, c) in field.iter() {
        buf[bin(k, m)] += c;
    }
    inverse_plan(m).process(&mut buf);
    buf
}

/// Reads the coefficients `|k| ≤ k_max` from raw grid values without the
/// finiteness check. Internal use by products.
pub(crate) fn analyze_unchecked(mut buf: Vec<Complex64>, k_max: usize) -> SpectralField {
    let m = buf.len();
    debug_assert!(m > 2 * k_max);
    forward_plan(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    SpectralField::from_fn(k_max, |k| buf[bin(k, m)] * scale)
}

/// Fourier coefficients `|k| ≤ k_max` of a smooth periodic real function
/// sampled on a grid fine enough that aliasing is below rounding for the
/// functions used here.
pub fn sample_function(k_max: usize, f: impl Fn(f64) -> f64) -> SpectralField {
    let m = fft_size((16 * k_max + 1).max(4096));
    let samples: Vec<Complex64> = grid(m).into_iter().map(|x| Complex64::new(f(x), 0.0)).collect();
    analyze_unchecked(samples, k_max)
}

/// Complex-valued version of [`sample_function`].
pub fn sample_function_complex(k_max: usize, f: impl Fn(f64) -> Complex64) -> SpectralField {
    let m = fft_size((16 * k_max + 1).max(4096));
    analyze_unchecked(grid(m).into_iter().map(f).collect(), k_max)
}
