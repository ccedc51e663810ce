use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex periodic function on ℝ/2πℤ stored as Fourier coefficients
/// `û_k`, `-K ≤ k ≤ K`, in ascending wavenumber order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    k_max: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(k_max: usize) -> Self {
        Self {
            k_max,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * k_max + 1],
        }
    }

    /// Coefficients ordered `k = -K..=K`. Rejects wrong lengths and
    /// non-finite entries.
    pub fn from_coeffs(k_max: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * k_max + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients for K = {k_max}, got {}",
                2 * k_max + 1,
                coeffs.len()
            )));
        }
        let field = Self { k_max, coeffs };
        field.validate()?;
        Ok(field)
    }

    pub fn from_fn(k_max: usize, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let k = k_max as i64;
        Self {
            k_max,
            coeffs: (-k..=k).map(&mut f).collect(),
        }
    }

    /// `amplitude · e^{ikx}`.
    pub fn mode(k_max: usize, k: i64, amplitude: Complex64) -> Self {
        let mut field = Self::zeros(k_max);
        field.set(k, amplitude);
        field
    }

    pub fn constant(k_max: usize, value: Complex64) -> Self {
        Self::mode(k_max, 0, value)
    }

    #[inline]
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    fn index(&self, k: i64) -> Option<usize> {
        let shifted = k + self.k_max as i64;
        (0..self.coeffs.len() as i64)
            .contains(&shifted)
            .then_some(shifted as usize)
    }

    /// Coefficient at wavenumber `k`; zero outside the band.
    #[inline]
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.index(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Panics if `k` lies outside the band.
    #[inline]
    pub fn set(&mut self, k: i64, value: Complex64) {
        let i = self
            .index(k)
            .unwrap_or_else(|| panic!("wavenumber {k} outside band K = {}", self.k_max));
        self.coeffs[i] = value;
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn wavenumbers(&self) -> std::ops::RangeInclusive<i64> {
        -(self.k_max as i64)..=self.k_max as i64
    }

    /// `(k, û_k)` pairs in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.wavenumbers().zip(self.coeffs.iter().copied())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput("field has non-finite coefficients".into()))
        }
    }

    /// Whether `û_{-k} = conj(û_k)` holds to `tol` (relative to the largest
    /// coefficient), i.e. the field is real in physical space.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.iter()
            .all(|(k, c)| (c - self.coeff(-k).conj()).norm() <= tol * scale.max(f64::MIN_POSITIVE))
    }

    /// Coefficients of the pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::from_fn(self.k_max, |k| self.coeff(-k).conj())
    }

    /// Coefficients of `Re u`.
    pub fn real_part(&self) -> Self {
        Self::from_fn(self.k_max, |k| 0.5 * (self.coeff(k) + self.coeff(-k).conj()))
    }

    /// Coefficients of `Im u`.
    pub fn imag_part(&self) -> Self {
        Self::from_fn(self.k_max, |k| {
            (self.coeff(k) - self.coeff(-k).conj()) / Complex64::new(0.0, 2.0)
        })
    }

    /// Zero-pads or truncates to a new band.
    pub fn resized(&self, k_max: usize) -> Self {
        Self::from_fn(k_max, |k| self.coeff(k))
    }

    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }

    pub fn map_modes(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        Self {
            k_max: self.k_max,
            coeffs: self.iter().map(|(k, c)| f(k, c)).collect(),
        }
    }

    /// `Σ_k conj(û_k) v̂_k`, which equals `(1/2π)∫ ū v dx`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_same_band(self, other);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `Σ_k |û_k|²`.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_same_band(self, other);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `self += a · x`
    pub fn axpy(&mut self, a: Complex64, x: &Self) {
        assert_same_band(self, x);
        for (s, xv) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += a * xv;
        }
    }

    pub fn scale(&mut self, a: Complex64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }
}

#[inline]
fn assert_same_band(a: &SpectralField, b: &SpectralField) {
    assert_eq!(
        a.k_max, b.k_max,
        "spectral fields with different bands cannot be combined"
    );
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for SpectralField {
    type Output = SpectralField;
    fn add(mut self, rhs: SpectralField) -> SpectralField {
        self += &rhs;
        self
    }
}

impl Sub for SpectralField {
    type Output = SpectralField;
    fn sub(mut self, rhs: SpectralField) -> SpectralField {
        self -= &rhs;
        self
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        assert_same_band(self, rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        assert_same_band(self, rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Neg for SpectralField {
    type Output = SpectralField;
    fn neg(mut self) -> SpectralField {
        for c in &mut self.coeffs {
            *c = -*c;
        }
        self
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        -self.clone()
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(Complex64::new(rhs, 0.0));
        out
    }
}

impl Mul<Complex64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: Complex64) -> SpectralField {
        let mut out = self.clone();
        out.scale(rhs);
        out
    }
}

impl Mul<f64> for SpectralField {
    type Output = SpectralField;
    fn mul(mut self, rhs: f64) -> SpectralField {
        self.scale(Complex64::new(rhs, 0.0));
        self
    }
}

impl Mul<Complex64> for SpectralField {
    type Output = SpectralField;
    fn mul(mut self, rhs: Complex64) -> SpectralField {
        self.scale(rhs);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coefficient_layout() {
        let f = SpectralField::from_fn(2, |k| c(k as f64, 0.0));
        assert_eq!(f.coeffs()[0], c(-2.0, 0.0));
        assert_eq!(f.coeff(2), c(2.0, 0.0));
        assert_eq!(f.coeff(3), c(0.0, 0.0));
    }

    #[test]
    fn rejects_non_finite() {
        let err = SpectralField::from_coeffs(1, vec![c(0.0, 0.0), c(f64::NAN, 0.0), c(0.0, 0.0)]);
        assert!(matches!(err, Err(Error::InvalidInput(_))));
        assert!(SpectralField::from_coeffs(1, vec![c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn real_part_and_conj() {
        // u = i e^{ix}: Re u = -sin x, conj(u) = -i e^{-ix}
        let u = SpectralField::mode(3, 1, c(0.0, 1.0));
        let re = u.real_part();
        assert!(re.is_real(1e-15));
        assert_eq!(re.coeff(1), c(0.0, 0.5));
        assert_eq!(re.coeff(-1), c(0.0, -0.5));
        assert_eq!(u.conj().coeff(-1), c(0.0, -1.0));
        assert!(!u.is_real(1e-12));
        let back = &re + &(&u.imag_part() * c(0.0, 1.0));
        assert!(back.max_abs_diff(&u) < 1e-16);
    }

    #[test]
    fn resize_pads_and_truncates() {
        let f = SpectralField::from_fn(3, |k| c(1.0 + k as f64, 0.0));
        let g = f.resized(5);
        assert_eq!(g.coeff(3), c(4.0, 0.0));
        assert_eq!(g.coeff(5), c(0.0, 0.0));
        assert_eq!(g.resized(1).coeff(-1), c(0.0, 0.0));
    }
}
