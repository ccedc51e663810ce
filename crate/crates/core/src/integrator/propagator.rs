use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expm::expm;
use crate::commutator::{dense_operator, DenseOperator, FunctionEnv, OperatorExpr, DENSE_MAX_K};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectral::SpectralField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorMode {
    /// Dispersion only: `e^{−i·dt·|k|^α/ε}`.
    MultiplierOnly,
    /// `exp(−dt·(i|D|^α + χ)/ε)` on the band, as a dense matrix.
    FullDense,
}

/// Exact evolution operator of the linear part over one step.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearPropagator {
    Phase { k_max: usize, factors: Vec<Complex64> },
    Dense(DenseOperator),
}

/// Dispersion frequency `ω_k = |k|^α / ε`.
pub fn frequency(k: i64, alpha: f64, eps: f64) -> f64 {
    (k.unsigned_abs() as f64).powf(alpha) / eps
}

/// `e^{−i t ω_k}` for `|k| ≤ k_max`.
pub fn phase_factors(k_max: usize, t: f64, alpha: f64, eps: f64) -> Vec<Complex64> {
    let k = k_max as i64;
    (-k..=k)
        .map(|m| Complex64::from_polar(1.0, -t * frequency(m, alpha, eps)))
        .collect()
}

pub fn linear_propagator(dt: f64, params: &ModelParams, k_max: usize, mode: PropagatorMode) -> Result<LinearPropagator> {
    match mode {
        PropagatorMode::MultiplierOnly => Ok(LinearPropagator::Phase {
            k_max,
            factors: phase_factors(k_max, dt, params.alpha, params.eps),
        }),
        PropagatorMode::FullDense => {
            if k_max > DENSE_MAX_K {
                return Err(Error::param(format!("dense propagator limited to K ≤ {DENSE_MAX_K}, got {k_max}")));
            }
            let env = FunctionEnv::new().with_damper(&params.damper, k_max);
            let generator = dense_operator(&OperatorExpr::pl(params.alpha), k_max, &env)?;
            let a = generator.into_matrix() * Complex64::new(-dt / params.eps, 0.0);
            Ok(LinearPropagator::Dense(DenseOperator::from_matrix(k_max, expm(&a)?)?))
        }
    }
}

impl LinearPropagator {
    pub fn k_max(&self) -> usize {
        match self {
            LinearPropagator::Phase { k_max, .. } => *k_max,
            LinearPropagator::Dense(op) => op.k_max(),
        }
    }

    pub fn apply(&self, v: &SpectralField) -> SpectralField {
        assert_eq!(v.k_max(), self.k_max(), "propagator band mismatch");
        match self {
            LinearPropagator::Phase { factors, .. } => {
                let mut out = v.clone();
                for (c, f) in out.coeffs_mut().iter_mut().zip(factors) {
                    *c *= f;
                }
                out
            }
            LinearPropagator::Dense(op) => op.apply(v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CutoffChi, Damper};
    use std::f64::consts::PI;

    fn field(k: usize) -> SpectralField {
        SpectralField::from_fn(k, |m| Complex64::new(1.0 / (1.0 + (m * m) as f64), 0.2 * m as f64 / (1.0 + (m * m * m * m) as f64)))
    }

    #[test]
    fn undamped_modes_coincide_and_conserve() {
        let p = ModelParams::capillary(0.1);
        let v = field(8);
        let a = linear_propagator(0.01, &p, 8, PropagatorMode::MultiplierOnly).unwrap().apply(&v);
        let b = linear_propagator(0.01, &p, 8, PropagatorMode::FullDense).unwrap().apply(&v);
        assert!(a.max_abs_diff(&b) < 1e-13);
        assert!((a.norm_sq() - v.norm_sq()).abs() < 1e-15);
    }

    #[test]
    fn uniform_damping_decays_exactly() {
        let p = ModelParams::gravity(0.1).with_damper(Damper::Uniform(0.7));
        let v = field(8);
        let out = linear_propagator(0.02, &p, 8, PropagatorMode::FullDense).unwrap().apply(&v);
        let factor = (-0.7f64 * 0.02 / 0.1).exp();
        assert!((out.norm_sq().sqrt() - factor * v.norm_sq().sqrt()).abs() < 1e-14);
    }

    #[test]
    fn dense_refuses_large_bands() {
        let p = ModelParams::capillary(0.1);
        assert!(linear_propagator(0.01, &p, 65, PropagatorMode::FullDense).is_err());
    }

    #[test]
    fn dense_exponential_matches_fine_splitting() {
        // Strang splitting with nalgebra's exponential for the χ factor
        let k = 12;
        let chi = Damper::Cutoff(CutoffChi::new(PI / 2.0, 1.5 * PI, PI / 8.0, k).unwrap());
        let p = ModelParams::capillary(0.1).with_damper(chi.clone());
        let dt = 0.01;
        let v = field(k);
        let exact = linear_propagator(dt, &p, k, PropagatorMode::FullDense).unwrap().apply(&v);

        let n = 1000;
        let h = dt / n as f64;
        let half = linear_propagator(0.5 * h, &p, k, PropagatorMode::MultiplierOnly).unwrap();
        let t = DenseOperator::toeplitz(k, &chi.spectrum(2 * k)).into_matrix() * Complex64::new(-h / p.eps, 0.0);
        let damp = DenseOperator::from_matrix(k, t.exp()).unwrap();
        let mut w = v.clone();
        for _ in 0..n {
            w = half.apply(&damp.apply(&half.apply(&w)));
        }
        assert!(w.max_abs_diff(&exact) < 1e-8, "{}", w.max_abs_diff(&exact));
    }
}
