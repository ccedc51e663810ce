use std::borrow::Cow;
use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{multiply_truncated, sample_function, smooth_step, synthesize, fft_size, SpectralField};

/// Smooth non-negative sponge cutoff supported on `[a, b] ⊂ [0, 2π)`:
/// `χ(x) = A·ρ((x−a)/δ)·ρ((b−x)/δ)`, with plateau `[a+δ, b−δ]`.
///
/// The coefficients are stored on band `2K` for a working band `K`, which is
/// what an alias-free product with a band-`K` field needs.
#[derive(Clone, Debug, PartialEq)]
pub struct CutoffChi {
    a: f64,
    b: f64,
    delta: f64,
    amplitude: f64,
    spectrum: SpectralField,
}

/// Serialized form: geometry plus the working band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffGeometry {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub amplitude: f64,
}

impl Default for CutoffGeometry {
    /// Sponge on `ω = [π/2, 3π/2]` with ramps of width π/8.
    fn default() -> Self {
        Self {
            a: std::f64::consts::FRAC_PI_2,
            b: 1.5 * std::f64::consts::PI,
            delta: std::f64::consts::PI / 8.0,
            amplitude: 1.0,
        }
    }
}

impl CutoffChi {
    /// `build_cutoff`: unit-amplitude cutoff with coefficients for working
    /// band `k_work`.
    pub fn new(a: f64, b: f64, delta: f64, k_work: usize) -> Result<Self> {
        Self::with_amplitude(a, b, delta, 1.0, k_work)
    }

    pub fn with_amplitude(a: f64, b: f64, delta: f64, amplitude: f64, k_work: usize) -> Result<Self> {
        if !(0.0 <= a && a < b && b < TAU) {
            return Err(Error::param(format!("cutoff support [{a}, {b}] must satisfy 0 ≤ a < b < 2π")));
        }
        if !(delta > 0.0 && 2.0 * delta < b - a) {
            return Err(Error::param(format!("cutoff width δ = {delta} must satisfy 0 < 2δ < b − a")));
        }
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::param(format!("cutoff amplitude {amplitude} must be non-negative")));
        }
        let mut chi = Self {
            a,
            b,
            delta,
            amplitude,
            spectrum: SpectralField::zeros(0),
        };
        chi.spectrum = chi.sampled(2 * k_work.max(1));
        Ok(chi)
    }

    pub fn from_geometry(g: CutoffGeometry, k_work: usize) -> Result<Self> {
        Self::with_amplitude(g.a, g.b, g.delta, g.amplitude, k_work)
    }

    pub fn geometry(&self) -> CutoffGeometry {
        CutoffGeometry {
            a: self.a,
            b: self.b,
            delta: self.delta,
            amplitude: self.amplitude,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Length of the plateau `[a+δ, b−δ]`.
    pub fn plateau_measure(&self) -> f64 {
        self.b - self.a - 2.0 * self.delta
    }

    /// Closed-form value at `x` (any real, reduced mod 2π).
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.rem_euclid(TAU);
        self.amplitude * smooth_step((x - self.a) / self.delta) * smooth_step((self.b - x) / self.delta)
    }

    /// Stored coefficients (band `2·k_work`).
    pub fn spectrum(&self) -> &SpectralField {
        &self.spectrum
    }

    /// Coefficients on at least band `k`, resampled if the stored band is
    /// too narrow.
    pub fn spectrum_for(&self, k: usize) -> Cow<'_, SpectralField> {
        if k <= self.spectrum.k_max() {
            Cow::Borrowed(&self.spectrum)
        } else {
            Cow::Owned(self.sampled(k))
        }
    }

    fn sampled(&self, k: usize) -> SpectralField {
        sample_function(k, |x| self.eval(x))
    }
}

/// The damping coefficient χ_ω of the model.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Damper {
    #[default]
    Off,
    /// Spatially constant `χ ≡ c`.
    Uniform(f64),
    Cutoff(CutoffChi),
}

impl Damper {
    pub fn is_off(&self) -> bool {
        match self {
            Damper::Off => true,
            Damper::Uniform(c) => *c == 0.0,
            Damper::Cutoff(chi) => chi.amplitude == 0.0,
        }
    }

    /// Pointwise value.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Damper::Off => 0.0,
            Damper::Uniform(c) => *c,
            Damper::Cutoff(chi) => chi.eval(x),
        }
    }

    /// Coefficients of χ on band `k` (truncated or resampled).
    pub fn spectrum(&self, k: usize) -> SpectralField {
        match self {
            Damper::Off => SpectralField::zeros(k),
            Damper::Uniform(c) => SpectralField::constant(k, Complex64::new(*c, 0.0)),
            Damper::Cutoff(chi) => chi.spectrum_for(k).resized(k),
        }
    }

    /// `χ·v` on the band of `v`. With `dealias` the retained coefficients are
    /// the exact convolution of `v̂` with `χ̂` truncated at `2K`.
    pub fn multiply(&self, v: &SpectralField, dealias: bool) -> SpectralField {
        match self {
            Damper::Off => SpectralField::zeros(v.k_max()),
            Damper::Uniform(c) => v * *c,
            Damper::Cutoff(chi) => {
                let spec = chi.spectrum_for(2 * v.k_max());
                multiply_truncated(&spec, v, v.k_max(), dealias)
            }
        }
    }

    /// `∫₀^{2π} χ|v|² dx`, by the trapezoid rule on a grid of at least
    /// `4K+1` points with χ band-limited at `2K`; this is exact for those
    /// band limits.
    pub fn weighted_mass(&self, v: &SpectralField) -> f64 {
        match self {
            Damper::Off => 0.0,
            Damper::Uniform(c) => c * TAU * v.norm_sq(),
            Damper::Cutoff(chi) => {
                let k = v.k_max();
                let spec = chi.spectrum_for(2 * k).resized(2 * k);
                let m = fft_size(4 * k + 1);
                let cs = synthesize(&spec, m).expect("grid holds band 2K");
                let vs = synthesize(v, m).expect("grid holds band K");
                let sum: f64 = cs.iter().zip(&vs).map(|(c, v)| c.re * v.norm_sqr()).sum();
                TAU * sum / m as f64
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn standard(k: usize) -> CutoffChi {
        CutoffChi::new(PI / 2.0, 1.5 * PI, PI / 8.0, k).unwrap()
    }

    #[test]
    fn plateau_and_support() {
        let chi = standard(32);
        assert!((chi.eval(PI) - 1.0).abs() < 1e-14);
        assert!(chi.eval(PI / 2.0 - 0.1).abs() < 1e-14);
        assert!(chi.eval(PI / 2.0 - 0.1 + TAU).abs() < 1e-14);
        for j in 0..1000 {
            let x = TAU * j as f64 / 1000.0;
            let v = chi.eval(x);
            assert!((0.0..=1.0).contains(&v));
            if (5.0 * PI / 8.0..=11.0 * PI / 8.0).contains(&x) {
                assert!((v - 1.0).abs() < 1e-14);
            }
            if !(PI / 2.0..=1.5 * PI).contains(&x) {
                assert!(v < 1e-14);
            }
        }
    }

    #[test]
    fn geometry_validated() {
        assert!(CutoffChi::new(1.0, 1.0, 0.1, 8).is_err());
        assert!(CutoffChi::new(1.0, 2.0, 0.5, 8).is_err());
        assert!(CutoffChi::new(-0.1, 2.0, 0.1, 8).is_err());
        assert!(CutoffChi::new(1.0, 7.0, 0.1, 8).is_err());
        assert!(CutoffChi::new(1.0, 2.0, 0.49, 8).is_ok());
    }

    #[test]
    fn spectrum_is_real_even_about_centre() {
        let chi = standard(16);
        assert_eq!(chi.spectrum().k_max(), 32);
        assert!(chi.spectrum().is_real(1e-13));
        // ρ(t) + ρ(1−t) = 1, so each ramp contributes δ/2 to the integral
        assert!((chi.spectrum().mean().re - 7.0 / 16.0).abs() < 1e-13);
    }

    #[test]
    fn weighted_mass_matches_fine_quadrature() {
        let chi = standard(8);
        let v = SpectralField::from_fn(8, |k| Complex64::new(1.0 / (1.0 + k as f64 * k as f64), 0.3 * k as f64 / 40.0));
        let damper = Damper::Cutoff(chi.clone());
        let exact = damper.weighted_mass(&v);
        let n = 20000;
        let fine: f64 = (0..n)
            .map(|j| {
                let x = TAU * j as f64 / n as f64;
                chi.eval(x) * crate::spectral::evaluate(&v, x).norm_sqr()
            })
            .sum::<f64>()
            * TAU
            / n as f64;
        assert!((exact - fine).abs() < 1e-12 * fine, "{exact} {fine}");
    }

    #[test]
    fn constant_field_mass_bounds() {
        let chi = standard(16);
        let one = SpectralField::constant(16, Complex64::new(1.0, 0.0));
        let m = Damper::Cutoff(chi.clone()).weighted_mass(&one);
        assert!(m <= PI + 1e-12 && m >= chi.plateau_measure() - 1e-12);
    }
}
