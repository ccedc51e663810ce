use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::propagator::{linear_propagator, phase_factors, LinearPropagator, PropagatorMode};
use crate::error::{Error, Result};
use crate::model::{transport_term, ModelParams};
use crate::spectral::SpectralField;

/// States with `‖v‖_0` above this count as blown up.
pub const BLOW_UP_NORM: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Integrating-factor RK4 with the dispersion folded into exact phases.
    LawsonRk4,
    /// Strang: half dense linear step, RK4 transport step, half linear step.
    DenseSplitting,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::LawsonRk4 => "lawson_rk4",
            Scheme::DenseSplitting => "dense_splitting",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lawson_rk4" => Ok(Scheme::LawsonRk4),
            "dense_splitting" => Ok(Scheme::DenseSplitting),
            _ => Err(Error::param(format!("unknown scheme {s:?} (lawson_rk4, dense_splitting)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    /// Safety factor `c_s`; the step never exceeds `c_s·ε`.
    pub safety: f64,
    pub t_end: f64,
    /// Diagnostics are sampled every `stride` steps.
    pub stride: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::LawsonRk4,
            dt: 1e-3,
            safety: 0.1,
            t_end: 1.0,
            stride: 1,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::param(format!("safety factor c_s = {} outside (0, 1]", self.safety)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::param(format!("t_end = {} must be non-negative", self.t_end)));
        }
        if self.stride == 0 {
            return Err(Error::param("stride must be at least 1"));
        }
        Ok(())
    }

    /// `min(dt, c_s·ε)`
    pub fn dt_eff(&self, eps: f64) -> f64 {
        self.dt.min(self.safety * eps)
    }

    /// Number of uniform steps covering `[0, t_end]` with step at most
    /// `dt_eff`, rounded up to a multiple of the stride, and the step used.
    pub fn plan(&self, eps: f64) -> (usize, f64) {
        let raw = (self.t_end / self.dt_eff(eps) * (1.0 - 1e-12)).ceil().max(0.0) as usize;
        let n = raw.div_ceil(self.stride) * self.stride;
        if n == 0 {
            (0, 0.0)
        } else {
            (n, self.t_end / n as f64)
        }
    }
}

/// Time stepper for the rescaled equation.
///
/// The Lawson scheme works in the interaction picture anchored at the start
/// time: it advances `w = E(−t)v` with `E(t) = e^{−it|D|^α/ε}`, so when the
/// damping and transport vanish `w` never changes and `v` carries exact
/// phases no matter how many steps are taken.
pub struct Integrator {
    params: ModelParams,
    scheme: Scheme,
    h: f64,
    t0: f64,
    steps: u64,
    w: SpectralField,
    dense_half: Option<LinearPropagator>,
}

impl Integrator {
    pub fn new(v0: SpectralField, params: ModelParams, scheme: Scheme, h: f64) -> Result<Self> {
        Self::starting_at(v0, params, scheme, h, 0.0)
    }

    pub fn starting_at(v0: SpectralField, params: ModelParams, scheme: Scheme, h: f64, t0: f64) -> Result<Self> {
        params.validate_dynamics()?;
        v0.validate()?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::param(format!("step h = {h} must be positive")));
        }
        let dense_half = match scheme {
            Scheme::LawsonRk4 => None,
            Scheme::DenseSplitting => Some(linear_propagator(0.5 * h, &params, v0.k_max(), PropagatorMode::FullDense)?),
        };
        Ok(Self {
            params,
            scheme,
            h,
            t0,
            steps: 0,
            w: v0,
            dense_half,
        })
    }

    pub fn time(&self) -> f64 {
        self.t0 + self.steps as f64 * self.h
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Current `v`.
    pub fn state(&self) -> SpectralField {
        match self.scheme {
            Scheme::LawsonRk4 => self.to_physical(&self.w, self.elapsed()),
            Scheme::DenseSplitting => self.w.clone(),
        }
    }

    fn elapsed(&self) -> f64 {
        self.steps as f64 * self.h
    }

    fn to_physical(&self, w: &SpectralField, s: f64) -> SpectralField {
        rotate(w, &phase_factors(w.k_max(), s, self.params.alpha, self.params.eps))
    }

    /// `−W(v)∂ₓv − χv/ε`
    fn explicit(&self, v: &SpectralField) -> SpectralField {
        let mut out = self.params.damper.multiply(v, self.params.dealias) * (-1.0 / self.params.eps);
        if self.params.transport {
            out -= &transport_term(v, &self.params);
        }
        out
    }

    fn interaction_rhs(&self, s: f64, w: &SpectralField) -> SpectralField {
        let k = w.k_max();
        let forward = phase_factors(k, s, self.params.alpha, self.params.eps);
        let n = self.explicit(&rotate(w, &forward));
        let back: Vec<Complex64> = forward.iter().map(|f| f.conj()).collect();
        rotate(&n, &back)
    }

    /// Advances one step; a non-finite or huge state is reported as blow-up
    /// at the time reached.
    pub fn step(&mut self) -> Result<()> {
        let h = self.h;
        match self.scheme {
            Scheme::LawsonRk4 => {
                let s = self.elapsed();
                let w = &self.w;
                let k1 = self.interaction_rhs(s, w);
                let k2 = self.interaction_rhs(s + 0.5 * h, &axpy(w, 0.5 * h, &k1));
                let k3 = self.interaction_rhs(s + 0.5 * h, &axpy(w, 0.5 * h, &k2));
                let k4 = self.interaction_rhs(s + h, &axpy(w, h, &k3));
                let mut next = w.clone();
                next.axpy(Complex64::new(h / 6.0, 0.0), &k1);
                next.axpy(Complex64::new(h / 3.0, 0.0), &k2);
                next.axpy(Complex64::new(h / 3.0, 0.0), &k3);
                next.axpy(Complex64::new(h / 6.0, 0.0), &k4);
                self.w = next;
            }
            Scheme::DenseSplitting => {
                let half = self.dense_half.as_ref().expect("dense propagator built for splitting");
                let mut v = half.apply(&self.w);
                if self.params.transport {
                    v = transport_rk4(&v, &self.params, h);
                }
                self.w = half.apply(&v);
            }
        }
        self.steps += 1;
        let v = self.state();
        if !v.is_finite() || v.norm_sq().sqrt() > BLOW_UP_NORM {
            return Err(Error::BlowUp {
                time: self.time(),
                state: Box::new(v),
            });
        }
        Ok(())
    }
}

fn rotate(v: &SpectralField, factors: &[Complex64]) -> SpectralField {
    let mut out = v.clone();
    for (c, f) in out.coeffs_mut().iter_mut().zip(factors) {
        *c *= f;
    }
    out
}

fn axpy(w: &SpectralField, a: f64, x: &SpectralField) -> SpectralField {
    let mut out = w.clone();
    out.axpy(Complex64::new(a, 0.0), x);
    out
}

/// Classical RK4 for `∂ₜv = −W(v)∂ₓv` over one step.
fn transport_rk4(v: &SpectralField, params: &ModelParams, h: f64) -> SpectralField {
    let f = |u: &SpectralField| -transport_term(u, params);
    let k1 = f(v);
    let k2 = f(&axpy(v, 0.5 * h, &k1));
    let k3 = f(&axpy(v, 0.5 * h, &k2));
    let k4 = f(&axpy(v, h, &k3));
    let mut out = v.clone();
    out.axpy(Complex64::new(h / 6.0, 0.0), &k1);
    out.axpy(Complex64::new(h / 3.0, 0.0), &k2);
    out.axpy(Complex64::new(h / 3.0, 0.0), &k3);
    out.axpy(Complex64::new(h / 6.0, 0.0), &k4);
    out
}

/// One step of size `dt_eff` from `v`.
pub fn step(v: &SpectralField, params: &ModelParams, stepper: &StepperConfig) -> Result<SpectralField> {
    stepper.validate()?;
    let mut it = Integrator::new(v.clone(), params.clone(), stepper.scheme, stepper.dt_eff(params.eps))?;
    it.step()?;
    Ok(it.state())
}
