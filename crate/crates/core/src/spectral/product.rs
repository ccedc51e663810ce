use super::transform::{analyze_unchecked, fft_size, synthesize_unchecked};
use super::SpectralField;
use crate::error::{Error, Result};

/// Product of two fields on a shared band, truncated back to that band.
///
/// With `dealias` the padded grid holds `M ≥ 3K+1` points (the 2/3 rule), so
/// every retained coefficient equals the exact convolution sum. Without it
/// the grid is the smallest transform size `≥ 2K+1` and high products alias.
pub fn pointwise_product(f: &SpectralField, g: &SpectralField, dealias: bool) -> Result<SpectralField> {
    if f.k_max() != g.k_max() {
        return Err(Error::ResolutionMismatch(f.k_max(), g.k_max()));
    }
    Ok(multiply_truncated(f, g, g.k_max(), dealias))
}

/// Product `f·g` returned on band `k_out`, for arbitrary input bands.
///
/// Coefficients of `f` beyond `K_g + k_out` cannot reach the output and are
/// ignored. The dealiased grid satisfies `M > K_f + K_g + k_out`.
pub fn multiply_truncated(f: &SpectralField, g: &SpectralField, k_out: usize, dealias: bool) -> SpectralField {
    let kf = f.k_max().min(g.k_max() + k_out);
    let kg = g.k_max().min(kf + k_out);
    let widest = kf.max(kg).max(k_out);
    let m = if dealias {
        fft_size(kf + kg + k_out + 1).max(fft_size(2 * widest + 1))
    } else {
        fft_size(2 * widest + 1)
    };
    let fs = synthesize_band(f, kf, m);
    let gs = synthesize_band(g, kg, m);
    let prod = fs.into_iter().zip(gs).map(|(a, b)| a * b).collect();
    analyze_unchecked(prod, k_out)
}

fn synthesize_band(field: &SpectralField, k: usize, m: usize) -> Vec<rustfft::num_complex::Complex64> {
    if k == field.k_max() {
        synthesize_unchecked(field, m)
    } else {
        synthesize_unchecked(&field.resized(k), m)
    }
}

/// Exact discrete convolution `Σ_m f̂_{k-m} ĝ_m` for `|k| ≤ k_out`, by direct
/// summation. Quadratic cost; used as a reference.
pub fn convolve_direct(f: &SpectralField, g: &SpectralField, k_out: usize) -> SpectralField {
    SpectralField::from_fn(k_out, |k| g.iter().map(|(m, gm)| f.coeff(k - m) * gm).sum())
}
