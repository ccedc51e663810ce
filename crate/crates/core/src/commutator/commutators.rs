//! Commutators `[A, B]u = A(Bu) − B(Au)` of the model operators.

use serde::Serialize;

use crate::model::{dispersion, dx, z_pl_power, Damper};
use crate::spectral::{multiply_truncated, MultiplierSpec, SpectralField};

/// `P_L^k(∂ₓu) − ∂ₓ(P_L^k u)`
pub fn commutator_pl_dx(u: &SpectralField, damper: &Damper, alpha: f64, k: usize) -> SpectralField {
    let a = z_pl_power(&dx(u), damper, alpha, k, true);
    let b = dx(&z_pl_power(u, damper, alpha, k, true));
    a - b
}

fn times(f: &SpectralField, u: &SpectralField) -> SpectralField {
    multiply_truncated(f, u, u.k_max(), true)
}

/// `P_L^k(f·u) − f·(P_L^k u)`
pub fn commutator_pl_f(u: &SpectralField, f: &SpectralField, damper: &Damper, alpha: f64, k: usize) -> SpectralField {
    let a = z_pl_power(&times(f, u), damper, alpha, k, true);
    let b = times(f, &z_pl_power(u, damper, alpha, k, true));
    a - b
}

/// `L(f·u) − f·Lu`
pub fn commutator_l_f(u: &SpectralField, f: &SpectralField, alpha: f64) -> SpectralField {
    dispersion(&times(f, u), alpha) - times(f, &dispersion(u, alpha))
}

/// `[L, f]u` split as `[L S_Λ, f]u + [L(1 − S_Λ), f]u` with the smooth
/// low-pass `S_Λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LSplit {
    pub total: SpectralField,
    pub low: SpectralField,
    pub high: SpectralField,
}

/// Norms of an [`LSplit`], for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LSplitNorms {
    pub total: f64,
    pub low: f64,
    pub high: f64,
}

pub fn commutator_l_f_split(u: &SpectralField, f: &SpectralField, alpha: f64, lambda: f64) -> LSplit {
    let s = MultiplierSpec::LowPass { lambda };
    let l_low = |g: &SpectralField| dispersion(&s.apply(g), alpha);
    let low = l_low(&times(f, u)) - times(f, &l_low(u));
    let total = commutator_l_f(u, f, alpha);
    let high = &total - &low;
    LSplit { total, low, high }
}

impl LSplit {
    pub fn norms(&self, s: f64) -> LSplitNorms {
        use crate::spectral::sobolev_norm;
        LSplitNorms {
            total: sobolev_norm(&self.total, s),
            low: sobolev_norm(&self.low, s),
            high: sobolev_norm(&self.high, s),
        }
    }
}

/// `[P_L, ∂ₓ]u` in closed form: `−(∂ₓχ)·u`.
pub fn pl_dx_base_case(u: &SpectralField, damper: &Damper) -> SpectralField {
    let chi = damper.spectrum(2 * u.k_max());
    -times(&dx(&chi), u)
}

/// `[P_L, f]u = i[L, f]u`, since multiplications commute.
pub fn pl_f_base_case(u: &SpectralField, f: &SpectralField, alpha: f64) -> SpectralField {
    commutator_l_f(u, f, alpha) * rustfft::num_complex::Complex64::new(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gaussian_profile, real_profile, rng};
    use crate::model::CutoffChi;
    use rustfft::num_complex::Complex64;
    use std::f64::consts::PI;

    fn chi(k: usize) -> Damper {
        Damper::Cutoff(CutoffChi::new(PI / 2.0, 1.5 * PI, PI / 8.0, k).unwrap())
    }

    #[test]
    fn constant_damper_commutes() {
        let u = gaussian_profile(16, 2.0, &mut rng(0, 0));
        let d = Damper::Uniform(0.7);
        for k in 1..=4 {
            let scale = dx(&z_pl_power(&u, &d, 1.5, k, true)).max_abs();
            assert!(commutator_pl_dx(&u, &d, 1.5, k).max_abs() < 1e-13 * scale);
        }
        let one = SpectralField::constant(16, Complex64::new(2.0, 0.0));
        assert!(commutator_pl_f(&u, &one, &chi(16), 0.5, 3).max_abs() < 1e-13);
        assert!(commutator_l_f(&u, &one, 0.5).max_abs() < 1e-13);
    }

    #[test]
    fn base_cases() {
        let k = 16;
        let u = gaussian_profile(k, 3.0, &mut rng(1, 0));
        let f = real_profile(k, 3.0, &mut rng(1, 1));
        let d = chi(k);
        let got = commutator_pl_dx(&u, &d, 1.5, 1);
        assert!(got.max_abs_diff(&pl_dx_base_case(&u, &d)) < 1e-12);

        // Every operator acts on the band-K space, so χ·(f·u) and f·(χ·u)
        // differ near the band edge. With u and f on band K/4 they agree for
        // |k| ≤ 3K/4.
        let (u, f) = (u.resized(k / 4).resized(k), f.resized(k / 4).resized(k));
        let got = commutator_pl_f(&u, &f, &d, 0.5, 1).resized(3 * k / 4);
        let want = pl_f_base_case(&u, &f, 0.5).resized(3 * k / 4);
        assert!(got.max_abs_diff(&want) < 1e-13 * want.max_abs(), "{}", got.max_abs_diff(&want));
    }

    #[test]
    fn mean_only_input() {
        let k = 8;
        let f = real_profile(k, 2.0, &mut rng(2, 0));
        let u = SpectralField::constant(k, Complex64::new(0.5, -0.25));
        let got = commutator_l_f(&u, &f, 1.5);
        let want = dispersion(&f, 1.5) * Complex64::new(0.5, -0.25);
        assert!(got.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn split_adds_up() {
        let k = 32;
        let u = gaussian_profile(k, 2.0, &mut rng(3, 0));
        let f = real_profile(k, 2.5, &mut rng(3, 1));
        for lambda in [1.0, 4.0, 16.0] {
            let s = commutator_l_f_split(&u, &f, 0.5, lambda);
            assert!((&(&s.low + &s.high) - &s.total).max_abs() < 1e-14);
        }
        // Λ = 1 keeps only the mean, which L annihilates
        assert!(commutator_l_f_split(&u, &f, 0.5, 1.0).low.max_abs() == 0.0);
    }
}
