use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SpectralField;
use crate::error::{Error, Result};

/// Fourier multipliers `û_k ↦ m(k) û_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierSpec {
    /// `|k|^α`, α ∈ (0, 2].
    FractionalDerivative { alpha: f64 },
    /// `ik`
    Derivative,
    /// `(ik)^{-1}` with the mean removed.
    Antiderivative,
    /// `(1 + k²)^{s/2}`
    Bessel { s: f64 },
    /// `φ(k/Λ)`, the smooth radial cutoff equal to 1 on `|ξ| ≤ 1/2` and 0 on
    /// `|ξ| ≥ 1`.
    LowPass { lambda: f64 },
}

/// Result of [`apply_multiplier`].
#[derive(Clone, Debug, PartialEq)]
pub struct Applied {
    pub field: SpectralField,
    /// Set when an antiderivative discarded a non-zero mean.
    pub mean_dropped: bool,
}

impl MultiplierSpec {
    pub fn fractional_derivative(alpha: f64) -> Result<Self> {
        let spec = Self::FractionalDerivative { alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn bessel(s: f64) -> Result<Self> {
        let spec = Self::Bessel { s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn low_pass(lambda: f64) -> Result<Self> {
        let spec = Self::LowPass { lambda };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::FractionalDerivative { alpha } if !(alpha > 0.0 && alpha <= 2.0) => {
                Err(Error::param(format!("fractional order α = {alpha} outside (0, 2]")))
            }
            Self::Bessel { s } if !s.is_finite() => Err(Error::param("Bessel order must be finite")),
            Self::LowPass { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                Err(Error::param(format!("low-pass threshold Λ = {lambda} must be positive")))
            }
            _ => Ok(()),
        }
    }

    pub fn symbol(&self, k: i64) -> Complex64 {
        let kf = k as f64;
        match *self {
            Self::FractionalDerivative { alpha } => Complex64::new(kf.abs().powf(alpha), 0.0),
            Self::Derivative => Complex64::new(0.0, kf),
            Self::Antiderivative => {
                if k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -1.0 / kf)
                }
            }
            Self::Bessel { s } => Complex64::new((1.0 + kf * kf).powf(0.5 * s), 0.0),
            Self::LowPass { lambda } => Complex64::new(bump(kf / lambda), 0.0),
        }
    }

    /// Applies the multiplier; an antiderivative silently drops the mean.
    pub fn apply(&self, field: &SpectralField) -> SpectralField {
        field.map_modes(|k, c| self.symbol(k) * c)
    }
}

/// Validated multiplier application that reports a dropped mean.
pub fn apply_multiplier(field: &SpectralField, spec: &MultiplierSpec) -> Result<Applied> {
    field.validate()?;
    spec.validate()?;
    let mean_dropped = matches!(spec, MultiplierSpec::Antiderivative) && field.mean() != Complex64::new(0.0, 0.0);
    Ok(Applied {
        field: spec.apply(field),
        mean_dropped,
    })
}

/// C^∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`,
/// `e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})` in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / t - 1.0 / (1.0 - t)).exp())
    }
}

/// Radial bump: 1 on `|ξ| ≤ 1/2`, 0 on `|ξ| ≥ 1`, smooth in between.
pub fn bump(xi: f64) -> f64 {
    smooth_step(2.0 * (1.0 - xi.abs()))
}
