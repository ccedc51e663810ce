use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;

use super::{Damper, EnergyFlavor, ModelParams};
use crate::error::{Error, Result};
use crate::spectral::{multiply_truncated, MultiplierSpec, SpectralField};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `W(v) = Re(⟨D⟩^{-N} v)`. Linear and real, so `W_ε = W` for every ε.
pub fn w_eps(v: &SpectralField, params: &ModelParams) -> SpectralField {
    w_smooth(v, params.n_smooth)
}

fn w_smooth(v: &SpectralField, n: u32) -> SpectralField {
    let s = -(n as f64);
    v.map_modes(|k, c| c * (1.0 + (k * k) as f64).powf(0.5 * s))
        .real_part()
}

/// `|D|^α v`
pub fn dispersion(v: &SpectralField, alpha: f64) -> SpectralField {
    MultiplierSpec::FractionalDerivative { alpha }.apply(v)
}

pub fn dx(v: &SpectralField) -> SpectralField {
    MultiplierSpec::Derivative.apply(v)
}

/// `P_L v = i|D|^α v + χ·v`
pub fn apply_pl(v: &SpectralField, damper: &Damper, alpha: f64, dealias: bool) -> SpectralField {
    let mut out = dispersion(v, alpha) * I;
    if !damper.is_off() {
        out += &damper.multiply(v, dealias);
    }
    out
}

/// `P_L^j v`, by repeated application.
pub fn z_pl_power(v: &SpectralField, damper: &Damper, alpha: f64, j: usize, dealias: bool) -> SpectralField {
    (0..j).fold(v.clone(), |acc, _| apply_pl(&acc, damper, alpha, dealias))
}

/// `W(a)·∂ₓb`
fn transport_of(a: &SpectralField, b: &SpectralField, params: &ModelParams) -> SpectralField {
    let w = w_eps(a, params);
    multiply_truncated(&w, &dx(b), b.k_max(), params.dealias)
}

/// The transport term `W(v)∂ₓv`, or zero when transport is disabled.
pub fn transport_term(v: &SpectralField, params: &ModelParams) -> SpectralField {
    if params.transport {
        transport_of(v, v, params)
    } else {
        SpectralField::zeros(v.k_max())
    }
}

/// `−(iL + χ)v / ε`
pub fn linear_rhs(v: &SpectralField, params: &ModelParams) -> SpectralField {
    apply_pl(v, &params.damper, params.alpha, params.dealias) * (-1.0 / params.eps)
}

/// `∂ₜv = −W(v)∂ₓv − (i/ε)|D|^α v − (1/ε)χ·v`
pub fn rhs(v: &SpectralField, params: &ModelParams) -> Result<SpectralField> {
    let mut out = linear_rhs(v, params);
    if params.transport {
        out -= &transport_of(v, v, params);
    }
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFinite("rhs"))
    }
}

/// `∂ₜU = −W(U)∂ₓU − i|D|^α U − χ·U`, the equation before rescaling.
pub fn rhs_unscaled(u: &SpectralField, params: &ModelParams) -> Result<SpectralField> {
    rhs(u, &params.unscaled())
}

/// `(ε∂ₜ)^j v` for `j ≤ 2`, obtained by substituting the equation.
pub fn z_time_power(v: &SpectralField, params: &ModelParams, j: usize) -> Result<SpectralField> {
    match j {
        0 => Ok(v.clone()),
        1 => Ok(rhs(v, params)? * params.eps),
        2 => {
            let zv = rhs(v, params)? * params.eps;
            // ε∂ₜ(Zv) with ∂ₜW(v) = W(∂ₜv)
            let mut out = apply_pl(&zv, &params.damper, params.alpha, params.dealias) * -1.0;
            if params.transport {
                let mut t = transport_of(&zv, v, params);
                t += &transport_of(v, &zv, params);
                out.axpy(Complex64::new(-params.eps, 0.0), &t);
            }
            if out.is_finite() {
                Ok(out)
            } else {
                Err(Error::NonFinite("z_time_power"))
            }
        }
        _ => Err(Error::param(format!("time vector field power {j} > 2"))),
    }
}

/// `‖Z^j v‖_0²` for `j = 0..=J` of the configured flavor.
pub fn energy_terms(v: &SpectralField, params: &ModelParams) -> Result<Vec<f64>> {
    params.validate()?;
    let j_max = params.flavor.order();
    match params.flavor {
        EnergyFlavor::CapTime => (0..=j_max)
            .map(|j| z_time_power(v, params, j).map(|z| z.norm_sq()))
            .collect(),
        EnergyFlavor::CapPl | EnergyFlavor::GravPl => {
            let mut z = v.clone();
            let mut terms = vec![z.norm_sq()];
            for _ in 0..j_max {
                z = apply_pl(&z, &params.damper, params.alpha, params.dealias);
                terms.push(z.norm_sq());
            }
            Ok(terms)
        }
    }
}

/// `E = Σ_{j≤J} ‖Z^j v‖_0²`
pub fn energy(v: &SpectralField, params: &ModelParams) -> Result<f64> {
    Ok(energy_terms(v, params)?.iter().sum())
}

/// Instantaneous `dE/dt` of the semi-discrete flow, split into the sponge
/// part `−(2/ε) Σ_j Re⟨Z^j v, χ Z^j v⟩` (never positive) and the remainder,
/// which comes from the transport term alone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyRate {
    pub damping: f64,
    pub transport: f64,
}

impl EnergyRate {
    pub fn total(&self) -> f64 {
        self.damping + self.transport
    }
}

/// `Z^j` applied to `v` and to the transport term, `j = 0..=J`. For
/// `Z = ε∂ₜ` the transport powers follow from the product rule.
fn z_stack(v: &SpectralField, params: &ModelParams) -> Result<(Vec<SpectralField>, Vec<SpectralField>)> {
    let zero = || SpectralField::zeros(v.k_max());
    match params.flavor {
        EnergyFlavor::CapTime => {
            let z1 = z_time_power(v, params, 1)?;
            let z2 = z_time_power(v, params, 2)?;
            let t = if params.transport {
                let mut t1 = transport_of(&z1, v, params);
                t1 += &transport_of(v, &z1, params);
                let mut t2 = transport_of(&z2, v, params);
                t2 += &(transport_of(&z1, &z1, params) * 2.0);
                t2 += &transport_of(v, &z2, params);
                vec![transport_of(v, v, params), t1, t2]
            } else {
                vec![zero(), zero(), zero()]
            };
            Ok((vec![v.clone(), z1, z2], t))
        }
        EnergyFlavor::CapPl | EnergyFlavor::GravPl => {
            let pl = |f: &SpectralField| apply_pl(f, &params.damper, params.alpha, params.dealias);
            let mut z = vec![v.clone()];
            let mut t = vec![transport_term(v, params)];
            for j in 0..params.flavor.order() {
                z.push(pl(&z[j]));
                t.push(pl(&t[j]));
            }
            Ok((z, t))
        }
    }
}

pub fn energy_rate(v: &SpectralField, params: &ModelParams) -> Result<EnergyRate> {
    params.validate()?;
    let (z, t) = z_stack(v, params)?;
    let mut rate = EnergyRate {
        damping: 0.0,
        transport: 0.0,
    };
    for (zj, tj) in z.iter().zip(&t) {
        if !params.damper.is_off() {
            rate.damping -= 2.0 / params.eps * zj.inner(&params.damper.multiply(zj, params.dealias)).re;
        }
        rate.transport -= 2.0 * zj.inner(tj).re;
    }
    if rate.damping.is_finite() && rate.transport.is_finite() {
        Ok(rate)
    } else {
        Err(Error::NonFinite("energy_rate"))
    }
}

/// `−(2/ε) ∫₀^{2π} χ|v|² dx`, never positive.
pub fn dissipation_rate(v: &SpectralField, params: &ModelParams) -> f64 {
    -(2.0 / params.eps) * params.damper.weighted_mass(v)
}

/// `∫₀^{2π} (∂ₓW(v)) |v|² dx`, the transport contribution to `d/dt ∫|v|²`.
pub fn transport_rate(v: &SpectralField, params: &ModelParams) -> f64 {
    if !params.transport {
        return 0.0;
    }
    let g = dx(&w_eps(v, params));
    let gv = multiply_truncated(&g, v, v.k_max(), true);
    TAU * v.inner(&gv).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CutoffChi;
    use crate::spectral::{analyze, fft_size, synthesize};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn smooth_field(k: usize, seed: f64) -> SpectralField {
        SpectralField::from_fn(k, |m| {
            let a = 1.0 / (1.0 + (m * m) as f64).powf(1.8);
            c(a * (seed * m as f64).cos(), a * (1.3 * seed + m as f64).sin())
        })
    }

    fn damped(k: usize) -> Damper {
        Damper::Cutoff(CutoffChi::new(PI / 2.0, 1.5 * PI, PI / 8.0, k).unwrap())
    }

    #[test]
    fn w_on_real_mode() {
        let p = ModelParams::capillary(0.1);
        let mut v = SpectralField::zeros(6);
        v.set(3, c(1.0, 0.0));
        v.set(-3, c(1.0, 0.0));
        let w = w_eps(&v, &p);
        let want = 10f64.powf(-2.0);
        assert!((w.coeff(3) - c(want, 0.0)).norm() < 1e-16);
        assert!((w.coeff(-3) - c(want, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn w_kills_imaginary_real_field() {
        let p = ModelParams::capillary(0.1);
        let u = smooth_field(8, 0.7).real_part();
        let w = w_eps(&(&u * I), &p);
        assert!(w.max_abs() < 1e-17);
    }

    #[test]
    fn w_is_conjugation_invariant_and_real() {
        let p = ModelParams::capillary(0.1);
        let v = smooth_field(12, 0.4);
        let w = w_eps(&v, &p);
        assert!(w.max_abs_diff(&w_eps(&v.conj(), &p)) < 1e-16);
        assert!((&w_eps(&(&v * 2.5), &p) - &(&w * 2.5)).max_abs() < 1e-15);
        let m = fft_size(4 * 12 + 1);
        let samples = synthesize(&w, m).unwrap();
        assert!(samples.iter().all(|s| s.im.abs() <= 1e-15 * v.norm_sq().sqrt()));
    }

    #[test]
    fn pl_examples() {
        let m = SpectralField::mode(8, 3, c(1.0, 0.0));
        let p = apply_pl(&m, &Damper::Off, 1.5, true);
        assert!((p.coeff(3) - c(0.0, 3f64.powf(1.5))).norm() < 1e-14);

        let chi = damped(8);
        let one = SpectralField::constant(8, c(1.0, 0.0));
        let p = apply_pl(&one, &chi, 1.5, true);
        assert!(p.max_abs_diff(&chi.spectrum(8)) < 1e-15);

        let p2 = z_pl_power(&m, &Damper::Off, 0.5, 2, true);
        assert!((p2.coeff(3) + c(3.0, 0.0)).norm() < 1e-14);
        assert_eq!(z_pl_power(&m, &chi, 0.5, 0, true), m);
    }

    #[test]
    fn rhs_examples() {
        let p = ModelParams::capillary(0.1).with_damper(damped(8));
        assert_eq!(rhs(&SpectralField::zeros(8), &p).unwrap().max_abs(), 0.0);

        let lin = ModelParams::capillary(0.1).with_transport(false);
        let r = rhs(&SpectralField::mode(8, 2, c(1.0, 0.0)), &lin).unwrap();
        assert!((r.coeff(2) - c(0.0, -2f64.powf(1.5) / 0.1)).norm() < 1e-12);
        assert!((&r - &SpectralField::mode(8, 2, r.coeff(2))).max_abs() == 0.0);
    }

    #[test]
    fn rhs_matches_physical_space_evaluation() {
        // transport by collocation on a fine grid, where aliasing is absent
        let k = 10;
        let p = ModelParams::capillary(0.2).with_damper(damped(k));
        let v = smooth_field(k, 0.9);
        let r = rhs(&v, &p).unwrap();
        let m = fft_size(4 * k + 1);
        let w = synthesize(&w_eps(&v, &p), m).unwrap();
        let dv = synthesize(&dx(&v), m).unwrap();
        let prod: Vec<_> = w.iter().zip(&dv).map(|(a, b)| a * b).collect();
        let transport = analyze(&prod, k).unwrap();
        let want = &linear_rhs(&v, &p) - &transport;
        assert!(r.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn z_without_transport_is_minus_pl() {
        let p = ModelParams::capillary(0.1).with_damper(damped(8)).with_transport(false);
        let v = smooth_field(8, 0.2);
        let z1 = z_time_power(&v, &p, 1).unwrap();
        let pl = apply_pl(&v, &p.damper, p.alpha, true);
        assert!((&z1 + &pl).max_abs() < 1e-13);
        let z2 = z_time_power(&v, &p, 2).unwrap();
        let pl2 = z_pl_power(&v, &p.damper, p.alpha, 2, true);
        assert!(z2.max_abs_diff(&pl2) < 1e-12);
        for j in 0..=2 {
            assert_eq!(z_time_power(&SpectralField::zeros(8), &p, j).unwrap().max_abs(), 0.0);
        }
        assert!(z_time_power(&v, &p, 3).is_err());
    }

    #[test]
    fn energy_of_mode() {
        let p = ModelParams::capillary(0.1).with_transport(false);
        let v = SpectralField::mode(8, 2, c(1.0, 0.0));
        let e = energy(&v, &p).unwrap();
        assert!((e - (1.0 + 8.0 + 64.0)).abs() < 1e-11);
        let pl = p.clone().with_flavor(EnergyFlavor::CapPl);
        assert!((energy(&v, &pl).unwrap() - e).abs() < 1e-11);
        assert_eq!(energy(&SpectralField::zeros(8), &ModelParams::gravity(0.1)).unwrap(), 0.0);
    }

    #[test]
    fn dissipation_sign_and_bounds() {
        let p = ModelParams::capillary(0.1).with_damper(damped(16));
        let one = SpectralField::constant(16, c(1.0, 0.0));
        let d = dissipation_rate(&one, &p);
        let plateau = PI - PI / 4.0;
        assert!(d <= -(2.0 / 0.1) * plateau && d >= -(2.0 / 0.1) * PI);
        assert_eq!(dissipation_rate(&one, &ModelParams::capillary(0.1)), 0.0);
        assert!(dissipation_rate(&smooth_field(16, 0.5), &p) < 0.0);
    }

    #[test]
    fn l2_identity_at_an_instant() {
        // 2π d/dt ‖v‖_0² = 2π·2 Re⟨v, ∂ₜv⟩ = transport_rate + dissipation_rate
        let k = 12;
        let p = ModelParams::gravity(0.1).with_damper(damped(k));
        let v = smooth_field(k, 1.1);
        let dvdt = rhs(&v, &p).unwrap();
        let lhs = TAU * 2.0 * v.inner(&dvdt).re;
        let rhs_ = transport_rate(&v, &p) + dissipation_rate(&v, &p);
        assert!((lhs - rhs_).abs() < 1e-12 * lhs.abs().max(1.0), "{lhs} {rhs_}");
    }

    #[test]
    fn energy_rate_matches_directional_difference() {
        let k = 24;
        for flavor in EnergyFlavor::ALL {
            let mut params = if flavor == EnergyFlavor::GravPl {
                ModelParams::gravity(0.2)
            } else {
                ModelParams::capillary(0.2)
            }
            .with_damper(damped(k));
            params.flavor = flavor;
            let v = smooth_field(k, 0.7) * 0.4;
            let r = rhs(&v, &params).unwrap();
            // E(v(t)) has derivative dE[v](∂ₜv) at the instant
            let tau = 1e-6;
            let plus = energy(&(&v + &(&r * tau)), &params).unwrap();
            let minus = energy(&(&v - &(&r * tau)), &params).unwrap();
            let fd = (plus - minus) / (2.0 * tau);
            let rate = energy_rate(&v, &params).unwrap();
            assert!(rate.damping <= 0.0);
            assert!((rate.total() - fd).abs() <= 1e-6 * fd.abs().max(1.0), "{flavor}: {rate:?} vs {fd}");

            let lin = params.clone().with_transport(false);
            let rl = energy_rate(&v, &lin).unwrap();
            assert_eq!(rl.transport, 0.0);
            assert!((rl.damping - rate.damping).abs() <= 1e-12 * rate.damping.abs() || flavor == EnergyFlavor::CapTime);
        }
    }
}
