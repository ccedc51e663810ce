//! Dense-matrix realisations of spectral operators on a truncated band.
//!
//! A multiplier is the diagonal of its symbol; multiplication by `f` is the
//! frequency-Toeplitz matrix `M_{jk} = f̂_{j−k}`. Products are therefore
//! exact convolutions truncated to the band, and the spectral code must
//! reproduce them to rounding.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{w_eps, Damper, ModelParams};
use crate::spectral::{multiply_truncated, MultiplierSpec, SpectralField};

/// Largest band the dense oracle accepts.
pub const DENSE_MAX_K: usize = 64;

/// Operator expressions shared by the dense and spectral evaluators.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorExpr {
    Identity,
    /// `|D|^α`
    Fractional(f64),
    /// `∂ₓ`
    Dx,
    /// `⟨D⟩^s`
    Bessel(f64),
    /// Smooth low-pass `φ(D/Λ)`.
    LowPass(f64),
    /// Multiplication by a named function from the environment.
    Multiply(String),
    Scale(Complex64, Box<OperatorExpr>),
    /// `A∘B∘C` for `[A, B, C]`; `C` acts first.
    Compose(Vec<OperatorExpr>),
    Sum(Vec<OperatorExpr>),
}

impl OperatorExpr {
    pub fn multiply(name: &str) -> Self {
        Self::Multiply(name.to_owned())
    }

    pub fn scale(c: Complex64, e: OperatorExpr) -> Self {
        Self::Scale(c, Box::new(e))
    }

    /// `iL + χ`, with χ looked up as `chi`.
    pub fn pl(alpha: f64) -> Self {
        Self::Sum(vec![
            Self::scale(Complex64::new(0.0, 1.0), Self::Fractional(alpha)),
            Self::multiply(CHI),
        ])
    }

    pub fn power(e: OperatorExpr, k: usize) -> Self {
        if k == 0 {
            Self::Identity
        } else {
            Self::Compose(vec![e; k])
        }
    }

    /// `A∘B − B∘A`
    pub fn commutator(a: OperatorExpr, b: OperatorExpr) -> Self {
        Self::Sum(vec![
            Self::Compose(vec![a.clone(), b.clone()]),
            Self::scale(Complex64::new(-1.0, 0.0), Self::Compose(vec![b, a])),
        ])
    }

    fn multiplier(&self) -> Option<MultiplierSpec> {
        match *self {
            Self::Fractional(alpha) => Some(MultiplierSpec::FractionalDerivative { alpha }),
            Self::Dx => Some(MultiplierSpec::Derivative),
            Self::Bessel(s) => Some(MultiplierSpec::Bessel { s }),
            Self::LowPass(lambda) => Some(MultiplierSpec::LowPass { lambda }),
            _ => None,
        }
    }
}

/// Name under which the sponge cutoff is registered.
pub const CHI: &str = "chi";

/// Named multiplication functions.
#[derive(Clone, Debug, Default)]
pub struct FunctionEnv {
    functions: BTreeMap<String, SpectralField>,
}

impl FunctionEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers χ with coefficients on band `4·k_max`, enough for any
    /// Toeplitz entry on band `k_max`.
    pub fn with_damper(mut self, damper: &Damper, k_max: usize) -> Self {
        self.insert(CHI, damper.spectrum(4 * k_max));
        self
    }

    pub fn insert(&mut self, name: &str, f: SpectralField) {
        self.functions.insert(name.to_owned(), f);
    }

    pub fn get(&self, name: &str) -> Result<&SpectralField> {
        self.functions
            .get(name)
            .ok_or_else(|| Error::UndefinedFunction(name.to_owned()))
    }
}

/// A `(2K+1)×(2K+1)` matrix acting on coefficients ordered `k = −K..K`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    k_max: usize,
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(k_max: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = 2 * k_max + 1;
        if matrix.shape() != (n, n) {
            return Err(Error::InvalidInput(format!("matrix shape {:?} does not match K = {k_max}", matrix.shape())));
        }
        Ok(Self { k_max, matrix })
    }

    pub fn identity(k_max: usize) -> Self {
        let n = 2 * k_max + 1;
        Self {
            k_max,
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn diagonal(k_max: usize, symbol: impl Fn(i64) -> Complex64) -> Self {
        let k = k_max as i64;
        let d = DVector::from_iterator(2 * k_max + 1, (-k..=k).map(symbol));
        Self {
            k_max,
            matrix: DMatrix::from_diagonal(&d),
        }
    }

    /// Multiplication by `f`: `M_{jk} = f̂_{j−k}`.
    pub fn toeplitz(k_max: usize, f: &SpectralField) -> Self {
        let n = 2 * k_max + 1;
        let k = k_max as i64;
        let matrix = DMatrix::from_fn(n, n, |r, c| f.coeff((r as i64 - k) - (c as i64 - k)));
        Self { k_max, matrix }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        assert_eq!(u.k_max(), self.k_max, "dense operator band mismatch");
        let x = DVector::from_column_slice(u.coeffs());
        let y = &self.matrix * x;
        SpectralField::from_fn(self.k_max, |k| y[(k + self.k_max as i64) as usize])
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            k_max: self.k_max,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(self.k_max), |acc, _| acc.compose(self))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Builds the dense matrix of `expr` on band `k_max ≤ 64`.
pub fn dense_operator(expr: &OperatorExpr, k_max: usize, env: &FunctionEnv) -> Result<DenseOperator> {
    if k_max > DENSE_MAX_K {
        return Err(Error::param(format!("dense oracle limited to K ≤ {DENSE_MAX_K}, got {k_max}")));
    }
    build(expr, k_max, env)
}

fn build(expr: &OperatorExpr, k_max: usize, env: &FunctionEnv) -> Result<DenseOperator> {
    if let Some(spec) = expr.multiplier() {
        spec.validate()?;
        return Ok(DenseOperator::diagonal(k_max, |k| spec.symbol(k)));
    }
    Ok(match expr {
        OperatorExpr::Identity => DenseOperator::identity(k_max),
        OperatorExpr::Multiply(name) => DenseOperator::toeplitz(k_max, env.get(name)?),
        OperatorExpr::Scale(c, e) => {
            let mut op = build(e, k_max, env)?;
            op.matrix *= *c;
            op
        }
        OperatorExpr::Compose(parts) => {
            let mut acc = DenseOperator::identity(k_max);
            for p in parts {
                acc = acc.compose(&build(p, k_max, env)?);
            }
            acc
        }
        OperatorExpr::Sum(parts) => {
            let n = 2 * k_max + 1;
            let mut acc = DMatrix::zeros(n, n);
            for p in parts {
                acc += build(p, k_max, env)?.matrix;
            }
            DenseOperator { k_max, matrix: acc }
        }
        _ => unreachable!("multipliers handled above"),
    })
}

/// Applies `expr` with the spectral machinery: multipliers on coefficients,
/// multiplications by dealiased transforms, truncated to the band of `u`.
pub fn apply_expr(expr: &OperatorExpr, u: &SpectralField, env: &FunctionEnv) -> Result<SpectralField> {
    if let Some(spec) = expr.multiplier() {
        spec.validate()?;
        return Ok(spec.apply(u));
    }
    Ok(match expr {
        OperatorExpr::Identity => u.clone(),
        OperatorExpr::Multiply(name) => multiply_truncated(env.get(name)?, u, u.k_max(), true),
        OperatorExpr::Scale(c, e) => apply_expr(e, u, env)? * *c,
        OperatorExpr::Compose(parts) => {
            let mut acc = u.clone();
            for p in parts.iter().rev() {
                acc = apply_expr(p, &acc, env)?;
            }
            acc
        }
        OperatorExpr::Sum(parts) => {
            let mut acc = SpectralField::zeros(u.k_max());
            for p in parts {
                acc += &apply_expr(p, u, env)?;
            }
            acc
        }
        _ => unreachable!("multipliers handled above"),
    })
}

/// Dense assembly of the right-hand side at `v`: diagonal dispersion,
/// cutoff Toeplitz, and transport as `Toeplitz(W(v))·diag(ik)`.
pub fn dense_rhs(v: &SpectralField, params: &ModelParams) -> Result<SpectralField> {
    let k = v.k_max();
    let env = FunctionEnv::new().with_damper(&params.damper, k);
    let mut linear = dense_operator(&OperatorExpr::pl(params.alpha), k, &env)?;
    linear.matrix *= Complex64::new(-1.0 / params.eps, 0.0);
    let mut out = linear.apply(v);
    if params.transport {
        let w = DenseOperator::toeplitz(k, &w_eps(v, params));
        let d = DenseOperator::diagonal(k, |m| Complex64::new(0.0, m as f64));
        out -= &w.compose(&d).apply(v);
    }
    Ok(out)
}
