//! Initial data and random ensembles.
//!
//! Random coefficients are drawn in the order `k = 0, 1, −1, 2, −2, …`, so a
//! draw at band `K` is exactly the truncation of the same draw at any larger
//! band. Resolution sweeps rely on this to compare like with like.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{sample_function_complex, sobolev_norm, SpectralField};

/// Deterministic generator for member `stream` of an ensemble seeded by `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Gaussian coefficients with envelope `⟨k⟩^{-decay}`.
pub fn gaussian_profile(k_max: usize, decay: f64, rng: &mut impl Rng) -> SpectralField {
    let mut field = SpectralField::zeros(k_max);
    let env = |k: i64| (1.0 + (k * k) as f64).powf(-0.5 * decay);
    field.set(0, gaussian(rng) * env(0));
    for m in 1..=k_max as i64 {
        field.set(m, gaussian(rng) * env(m));
        field.set(-m, gaussian(rng) * env(m));
    }
    field
}

/// Real-valued counterpart of [`gaussian_profile`].
pub fn real_profile(k_max: usize, decay: f64, rng: &mut impl Rng) -> SpectralField {
    gaussian_profile(k_max, decay, rng).real_part()
}

/// Rescales so that `‖field‖_s = target`. A zero field is returned unchanged.
pub fn normalized(field: SpectralField, s: f64, target: f64) -> SpectralField {
    let n = sobolev_norm(&field, s);
    if n == 0.0 {
        field
    } else {
        field * (target / n)
    }
}

/// Default initial data: profile `⟨k⟩^{-σ-0.55}`, unit `‖·‖_σ`.
pub fn random_data(k_max: usize, sigma: f64, rng: &mut impl Rng) -> SpectralField {
    normalized(gaussian_profile(k_max, sigma + 0.55, rng), sigma, 1.0)
}

/// Periodised Gaussian envelope `exp(−(x−x₀)²/2w²)` carrying
/// `e^{i(k₀(x−x₀) + φ)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavePacket {
    pub center: f64,
    pub width: f64,
    pub wavenumber: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Default for WavePacket {
    /// Centred at `x = 0`, opposite the default sponge on `[π/2, 3π/2]`.
    fn default() -> Self {
        Self {
            center: 0.0,
            width: 0.3,
            wavenumber: 2.0,
            phase: 0.0,
        }
    }
}

impl WavePacket {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width < PI) || !self.center.is_finite() || !self.wavenumber.is_finite() || !self.phase.is_finite() {
            return Err(Error::param(format!("wave packet {self:?} needs 0 < width < π")));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let d = (x - self.center + PI).rem_euclid(TAU) - PI;
        let env: f64 = (-2..=2)
            .map(|n| {
                let y = d + TAU * n as f64;
                (-0.5 * y * y / (self.width * self.width)).exp()
            })
            .sum();
        Complex64::from_polar(env, self.wavenumber * d + self.phase)
    }

    /// Coefficients on band `k_max`, normalised to `‖·‖_s = 1`.
    pub fn field(&self, k_max: usize, s: f64) -> Result<SpectralField> {
        self.validate()?;
        if self.wavenumber.fract() != 0.0 {
            return Err(Error::param("wave packet carrier must be an integer wavenumber"));
        }
        Ok(normalized(sample_function_complex(k_max, |x| self.eval(x)), s, 1.0))
    }
}

/// How initial data are produced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Random,
    Packet(WavePacket),
    /// A single Fourier mode `e^{ikx}`.
    Mode { wavenumber: i64 },
}

impl Generator {
    /// Data with unit `‖·‖_σ`.
    pub fn generate(&self, k_max: usize, sigma: f64, seed: u64) -> Result<SpectralField> {
        match self {
            Generator::Random => Ok(random_data(k_max, sigma, &mut rng(seed, 0))),
            Generator::Packet(p) => p.field(k_max, sigma),
            Generator::Mode { wavenumber } => {
                if wavenumber.unsigned_abs() as usize > k_max {
                    return Err(Error::param(format!("mode {wavenumber} outside band K = {k_max}")));
                }
                let mode = SpectralField::mode(k_max, *wavenumber, Complex64::new(1.0, 0.0));
                Ok(normalized(mode, sigma, 1.0))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_nested() {
        let big = gaussian_profile(64, 2.0, &mut rng(9, 3));
        let small = gaussian_profile(16, 2.0, &mut rng(9, 3));
        assert_eq!(big.resized(16), small);
        assert_ne!(gaussian_profile(16, 2.0, &mut rng(9, 4)), small);
    }

    #[test]
    fn random_data_is_normalised() {
        let v = random_data(32, 3.0, &mut rng(1, 0));
        assert!((sobolev_norm(&v, 3.0) - 1.0).abs() < 1e-14);
        assert!(real_profile(8, 1.0, &mut rng(1, 0)).is_real(1e-15));
    }

    #[test]
    fn packet_is_localised_and_periodic() {
        let p = WavePacket::default();
        assert!((p.eval(0.0).re - 1.0).abs() < 1e-12);
        assert!(p.eval(PI / 2.0).norm() < 1e-5);
        assert!((p.eval(0.4) - p.eval(0.4 + TAU)).norm() < 1e-12);
        let f = p.field(64, 2.0).unwrap();
        assert!((sobolev_norm(&f, 2.0) - 1.0).abs() < 1e-14);
        assert!(f.coeff(2).norm() > f.coeff(-2).norm());
        assert!(f.coeff(64).norm() < 1e-12 * f.max_abs());
        assert!(WavePacket { wavenumber: 1.5, ..p }.field(8, 0.0).is_err());
    }
}
