//! The damped toy model: sponge cutoff, transport coefficient, `P_L`,
//! right-hand sides, vector-field energies and dissipation.

mod cutoff;
mod operators;
mod params;

pub use cutoff::{CutoffChi, CutoffGeometry, Damper};
pub use operators::{
    EnergyRate,
    apply_pl, dispersion, dissipation_rate, dx, energy, energy_rate, energy_terms, linear_rhs, rhs, rhs_unscaled,
    transport_rate, transport_term, w_eps, z_pl_power, z_time_power,
};
pub use params::{EnergyFlavor, ModelParams, CAPILLARY_ALPHA, GRAVITY_ALPHA};
