//! Committed regression bands for quantities whose constants are only
//! known up to size: energy/Sobolev equivalence ratios and ensemble maxima
//! of the operator suites.
//!
//! The bands live in `baselines/baselines.json` at the crate root. They are
//! regenerated by running the ignored `regenerate_baselines` test with
//! `REGEN_BASELINES=1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::commutator::{ratio_suite, LemmaId, SuiteParams, SuiteSpec};
use crate::error::{Error, Result};
use crate::generate::{random_data, rng};
use crate::model::{energy, CutoffChi, CutoffGeometry, Damper, EnergyFlavor, ModelParams};
use crate::spectral::{sobolev_norm, SpectralField};

/// Relative tolerance applied on both ends of a committed band.
pub const BASELINE_TOLERANCE: f64 = 0.25;

const COMMITTED: &str = include_str!("../../baselines/baselines.json");

/// Closed interval of positive values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub min: f64,
    pub max: f64,
}

impl Band {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Option<Band> {
        values.into_iter().fold(None, |acc, x| match acc {
            None => Some(Band { min: x, max: x }),
            Some(b) => Some(Band {
                min: b.min.min(x),
                max: b.max.max(x),
            }),
        })
    }

    pub fn union(self, other: Band) -> Band {
        Band {
            min: self.min.min(other.min),
            max: self.max.max(other.max),
        }
    }

    /// How far `x` lies outside the band, relative to the nearer end; zero
    /// or negative inside.
    pub fn excursion(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::INFINITY;
        }
        ((self.min - x) / self.min).max((x - self.max) / self.max)
    }

    pub fn admits(&self, x: f64, tolerance: f64) -> bool {
        self.excursion(x) <= tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    /// `E/‖v‖_σ²` per energy flavor name.
    pub energy_equivalence: BTreeMap<String, Band>,
    /// Per-resolution ensemble maxima of `‖uv‖_s / (‖u‖_s‖v‖_s)`.
    pub algebra_constant: Band,
    /// Per-resolution ensemble maxima of the `[P_L^4, f]` ratio at
    /// `α = 1/2`, `s = 0`, `r = 2`.
    pub gravity_commutator: Band,
}

impl Baselines {
    pub fn committed() -> Result<Baselines> {
        serde_json::from_str(COMMITTED).map_err(|e| Error::Format(format!("committed baselines: {e}")))
    }

    pub fn energy_band(&self, flavor: EnergyFlavor) -> Result<Band> {
        self.energy_equivalence
            .get(flavor.name())
            .copied()
            .ok_or_else(|| Error::Format(format!("no baseline for flavor {flavor}")))
    }
}

/// Model used for the equivalence ensembles: the flavor's preset at
/// ε = 0.1 with the default cutoff and transport on.
pub fn reference_params(flavor: EnergyFlavor, k_max: usize) -> Result<ModelParams> {
    let base = match flavor {
        EnergyFlavor::GravPl => ModelParams::gravity(0.1),
        _ => ModelParams::capillary(0.1),
    };
    let chi = CutoffChi::from_geometry(CutoffGeometry::default(), k_max)?;
    Ok(base.with_damper(Damper::Cutoff(chi)).with_flavor(flavor))
}

pub fn energy_ratio(v: &SpectralField, params: &ModelParams) -> Result<f64> {
    let n = sobolev_norm(v, params.sigma);
    Ok(energy(v, params)? / (n * n))
}

/// `E/‖v‖_σ²` over `ensemble` random fields at band `k_max`; member `m`
/// uses stream `m` of `seed`.
pub fn energy_ratio_samples(flavor: EnergyFlavor, ensemble: usize, seed: u64, k_max: usize) -> Result<Vec<f64>> {
    let params = reference_params(flavor, k_max)?;
    (0..ensemble)
        .map(|m| {
            let v = random_data(k_max, params.sigma, &mut rng(seed, m as u64));
            energy_ratio(&v, &params)
        })
        .collect()
}

/// Ensemble maxima of a ratio suite, one per resolution.
pub fn suite_maxima(lemma: LemmaId, params: SuiteParams, ensemble: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(ratio_suite(&SuiteSpec::new(lemma, params, ensemble, seed))?.max_ratios())
}

pub fn algebra_params() -> SuiteParams {
    SuiteParams::new(0, 0.0, 1.0, 0.0)
}

pub fn gravity_commutator_params() -> SuiteParams {
    SuiteParams::new(4, 0.5, 0.0, 2.0)
}
