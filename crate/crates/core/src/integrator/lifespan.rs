//! First time at which the unscaled solution reaches `θ` times its initial
//! size, and the scaling of that time with ε.

use serde::{Deserialize, Serialize};

use super::stepper::{Integrator, StepperConfig};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectral::{sobolev_norm, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LifespanCause {
    /// `‖U‖_σ` reached `θε`.
    Threshold,
    /// `t_max` reached first.
    Completed,
    BlowUp,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanResult {
    pub eps: f64,
    pub time: f64,
    pub cause: LifespanCause,
    /// `T_ε·ε`; values above 1 mean the run outlived the `1/ε` scale.
    pub time_times_eps: f64,
    pub steps: usize,
}

/// Integrates `∂ₜU + W(U)∂ₓU + i|D|^α U + χU = 0` from `U₀ = ε·profile`,
/// with `profile` normalised to `‖·‖_σ = 1`, until `‖U‖_σ ≥ θε` or `t_max`.
/// The crossing time is interpolated linearly within the last step.
pub fn lifespan_probe(
    params: &ModelParams,
    profile: &SpectralField,
    eps: f64,
    theta: f64,
    t_max: f64,
    stepper: &StepperConfig,
) -> Result<LifespanResult> {
    if !(theta > 1.0) {
        return Err(Error::param(format!("threshold factor θ = {theta} must exceed 1")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::param(format!("ε = {eps} outside (0, 1]")));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::param(format!("t_max = {t_max} must be positive")));
    }
    stepper.validate()?;
    let unscaled = params.unscaled();
    let sigma = params.sigma;
    let n0 = sobolev_norm(profile, sigma);
    let u0 = if n0 == 0.0 { profile.clone() } else { profile * (eps / n0) };
    let target = theta * eps;
    let h_max = stepper.dt_eff(1.0);
    let n_steps = (t_max / h_max).ceil() as usize;
    let h = t_max / n_steps as f64;
    let result = |time, cause, steps| LifespanResult {
        eps,
        time,
        cause,
        time_times_eps: time * eps,
        steps,
    };
    let mut it = Integrator::new(u0.clone(), unscaled, stepper.scheme, h)?;
    let mut prev = sobolev_norm(&u0, sigma);
    for n in 1..=n_steps {
        match it.step() {
            Ok(()) => {}
            Err(Error::BlowUp { time, .. }) => return Ok(result(time, LifespanCause::BlowUp, n)),
            Err(e) => return Err(e),
        }
        let now = sobolev_norm(&it.state(), sigma);
        if now >= target {
            let frac = if now > prev { (target - prev) / (now - prev) } else { 1.0 };
            let time = it.time() - h * (1.0 - frac.clamp(0.0, 1.0));
            return Ok(result(time, LifespanCause::Threshold, n));
        }
        prev = now;
    }
    Ok(result(t_max, LifespanCause::Completed, n_steps))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::param("slope fit needs at least two paired points"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::param("slope fit needs positive finite values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::param("slope fit needs distinct abscissae"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rustfft::num_complex::Complex64;

    #[test]
    fn slope_of_power_law() {
        let x = [0.2, 0.1, 0.05, 0.025];
        let y: Vec<f64> = x.iter().map(|e: &f64| 3.0 * e.powf(-1.3)).collect();
        assert!((loglog_slope(&x, &y).unwrap() + 1.3).abs() < 1e-12);
        assert!(loglog_slope(&[1.0], &[1.0]).is_err());
        assert!(loglog_slope(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn trivial_probes_complete() {
        let p = ModelParams::capillary(0.1).with_transport(false);
        let cfg = StepperConfig {
            dt: 0.05,
            safety: 1.0,
            ..Default::default()
        };
        let zero = lifespan_probe(&p, &SpectralField::zeros(8), 0.1, 2.0, 5.0, &cfg).unwrap();
        assert_eq!(zero.cause, LifespanCause::Completed);
        assert_eq!(zero.time, 5.0);
        let profile = SpectralField::from_fn(8, |k| Complex64::new(1.0 / (1.0 + (k * k) as f64), 0.0));
        let linear = lifespan_probe(&p, &profile, 0.1, 2.0, 5.0, &cfg).unwrap();
        assert_eq!(linear.cause, LifespanCause::Completed);
        assert!(lifespan_probe(&p, &profile, 0.1, 1.0, 5.0, &cfg).is_err());
    }
}
