use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Damper;
use crate::error::{Error, Result};

/// Which vector-field energy a run tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnergyFlavor {
    /// `Σ_{j≤2} ‖(ε∂ₜ)^j v‖²`
    #[serde(rename = "cap_time")]
    CapTime,
    /// `Σ_{j≤2} ‖P_L^j v‖²`
    #[serde(rename = "cap_PL")]
    CapPl,
    /// `Σ_{j≤4} ‖P_L^j v‖²`
    #[serde(rename = "grav_PL")]
    GravPl,
}

impl EnergyFlavor {
    pub const ALL: [EnergyFlavor; 3] = [EnergyFlavor::CapTime, EnergyFlavor::CapPl, EnergyFlavor::GravPl];

    /// Highest power of the vector field in the energy.
    pub fn order(self) -> usize {
        match self {
            EnergyFlavor::CapTime | EnergyFlavor::CapPl => 2,
            EnergyFlavor::GravPl => 4,
        }
    }

    /// Least data regularity for which the energy is finite and controlled.
    pub fn min_sigma(self) -> f64 {
        match self {
            EnergyFlavor::CapTime | EnergyFlavor::CapPl => 3.0,
            EnergyFlavor::GravPl => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EnergyFlavor::CapTime => "cap_time",
            EnergyFlavor::CapPl => "cap_PL",
            EnergyFlavor::GravPl => "grav_PL",
        }
    }
}

impl fmt::Display for EnergyFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnergyFlavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        EnergyFlavor::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param(format!("unknown energy flavor {s:?} (cap_time, cap_PL, grav_PL)")))
    }
}

pub const CAPILLARY_ALPHA: f64 = 1.5;
pub const GRAVITY_ALPHA: f64 = 0.5;

/// Everything that determines the right-hand side and the tracked energy.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// Dispersion order, `L = |D|^α`.
    pub alpha: f64,
    pub eps: f64,
    /// Smoothing order of `W = Re ⟨D⟩^{-N}`.
    pub n_smooth: u32,
    pub damper: Damper,
    /// Whether the transport term `W(v)∂ₓv` is present.
    pub transport: bool,
    pub flavor: EnergyFlavor,
    /// Data regularity.
    pub sigma: f64,
    pub dealias: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::capillary(0.1)
    }
}

impl ModelParams {
    /// α = 3/2, σ = 3, `cap_time` energy, no damper.
    pub fn capillary(eps: f64) -> Self {
        Self {
            alpha: CAPILLARY_ALPHA,
            eps,
            n_smooth: 4,
            damper: Damper::Off,
            transport: true,
            flavor: EnergyFlavor::CapTime,
            sigma: 3.0,
            dealias: true,
        }
    }

    /// α = 1/2, σ = 2, `grav_PL` energy, no damper.
    pub fn gravity(eps: f64) -> Self {
        Self {
            alpha: GRAVITY_ALPHA,
            sigma: 2.0,
            flavor: EnergyFlavor::GravPl,
            ..Self::capillary(eps)
        }
    }

    pub fn with_damper(mut self, damper: Damper) -> Self {
        self.damper = damper;
        self
    }

    pub fn with_transport(mut self, on: bool) -> Self {
        self.transport = on;
        self
    }

    pub fn with_flavor(mut self, flavor: EnergyFlavor) -> Self {
        self.flavor = flavor;
        self
    }

    /// The same model at ε = 1, which is the unscaled equation for `U`.
    pub fn unscaled(&self) -> Self {
        Self {
            eps: 1.0,
            ..self.clone()
        }
    }

    /// Checks α, ε and N, which is all the time stepping needs.
    pub fn validate_dynamics(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::param(format!("α = {} outside (0, 2]", self.alpha)));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::param(format!("ε = {} outside (0, 1]", self.eps)));
        }
        if self.n_smooth == 0 {
            return Err(Error::param("smoothing order N must be a positive integer"));
        }
        Ok(())
    }

    /// Full check, including the σ required by the energy flavor.
    pub fn validate(&self) -> Result<()> {
        self.validate_dynamics()?;
        if !self.sigma.is_finite() || self.sigma < self.flavor.min_sigma() {
            return Err(Error::param(format!(
                "energy flavor {} needs σ ≥ {}, got σ = {}",
                self.flavor,
                self.flavor.min_sigma(),
                self.sigma
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        ModelParams::capillary(0.1).validate().unwrap();
        ModelParams::gravity(0.05).validate().unwrap();
        assert_eq!(ModelParams::gravity(0.1).unscaled().eps, 1.0);
    }

    #[test]
    fn invariants_enforced() {
        let mut p = ModelParams::gravity(0.1);
        p.sigma = 1.5;
        assert!(p.validate().is_err());
        let mut p = ModelParams::capillary(0.1);
        p.sigma = 2.5;
        assert!(p.validate().is_err());
        p.sigma = 3.0;
        p.alpha = 0.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::capillary(1.5);
        assert!(p.validate().is_err());
        p.eps = 1.0;
        p.n_smooth = 0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn flavor_names_round_trip() {
        for f in EnergyFlavor::ALL {
            assert_eq!(f.name().parse::<EnergyFlavor>().unwrap(), f);
            assert_eq!(serde_json::to_string(&f).unwrap(), format!("\"{}\"", f.name()));
        }
        assert!("cap".parse::<EnergyFlavor>().is_err());
    }
}
