//! Periodic spectral representation on ℝ/2πℤ.

mod field;
pub mod io;
mod multiplier;
mod norms;
mod product;
mod transform;

pub use field::SpectralField;
pub use multiplier::{apply_multiplier, bump, smooth_step, Applied, MultiplierSpec};
pub use norms::{evaluate, sobolev_norm, sup_norm};
pub use product::{convolve_direct, multiply_truncated, pointwise_product};
pub use transform::{analyze, fft_size, grid, sample_function, sample_function_complex, synthesize};
