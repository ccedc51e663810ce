//! Pseudospectral simulator and numerical verification lab for a damped
//! fractional-dispersion toy water-wave model on the circle
//!
//! ```text
//! ∂ₜv + W(v)∂ₓv + (i/ε)|D|^α v + (1/ε)χ_ω v = 0,   x ∈ ℝ/2πℤ
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: Fourier coefficient fields, transforms, multipliers,
//!   Sobolev norms and dealiased products.
//! * [`model`]: the sponge cutoff χ_ω, the transport coefficient W, the
//!   operator P_L = i|D|^α + χ_ω, right-hand sides, vector-field energies and
//!   the dissipation functional.
//! * [`commutator`]: commutator realisations, dense-matrix oracles and the
//!   operator-norm ratio suites.
//! * [`integrator`]: Lawson RK4 and dense Strang splitting, trajectory
//!   diagnostics and lifespan probes.
//! * [`harness`]: run configuration, experiment registry, sweeps and the
//!   exit-code contract used by the `dampwave` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commutator;
pub mod error;
pub mod generate;
pub mod harness;
pub mod integrator;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
