use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::stepper::{Integrator, StepperConfig};
use crate::error::{Error, Result};
use crate::model::{
    dissipation_rate, energy, energy_rate, transport_rate, z_pl_power, CutoffGeometry, Damper, ModelParams,
};
use crate::spectral::{sobolev_norm, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cause", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    NormDoubled { time: f64 },
    Nonfinite { time: f64 },
}

/// Extra norms sampled alongside the standard diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum Tracked {
    /// `‖v‖_s`
    Sobolev(f64),
    /// `‖P_L^j v‖_0`
    PlPower(usize),
}

impl Tracked {
    fn measure(&self, v: &SpectralField, params: &ModelParams) -> f64 {
        match *self {
            Tracked::Sobolev(s) => sobolev_norm(v, s),
            Tracked::PlPower(j) => z_pl_power(v, &params.damper, params.alpha, j, params.dealias)
                .norm_sq()
                .sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackedNorm {
    pub quantity: Tracked,
    pub values: Vec<f64>,
}

/// Sampled diagnostics of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub l2_norm: Vec<f64>,
    pub sob_sigma_norm: Vec<f64>,
    pub energy: Vec<f64>,
    /// Sponge part of the exact `dE/dt`.
    pub energy_damping: Vec<f64>,
    /// Transport part of the exact `dE/dt`.
    pub energy_transport: Vec<f64>,
    /// `−(2/ε)∫χ|v|² dx`
    pub dissipation: Vec<f64>,
    /// `∫(∂ₓW)|v|² dx`
    pub transport: Vec<f64>,
    /// `|2π·d/dt‖v‖_0² − transport − dissipation|`, with the time derivative
    /// from finite differences of the samples.
    pub identity_residual: Vec<f64>,
    pub tracked: Vec<TrackedNorm>,
    pub termination: Termination,
    pub step: f64,
    pub steps: usize,
    #[serde(skip)]
    pub final_state: Option<SpectralField>,
}

/// Model and stepper metadata written next to a trajectory CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub alpha: f64,
    pub eps: f64,
    pub n_smooth: u32,
    pub damper: DamperInfo,
    pub transport: bool,
    pub flavor: String,
    pub sigma: f64,
    pub dealias: bool,
    pub k_max: usize,
    pub seed: u64,
    pub stepper: StepperConfig,
    pub step: f64,
    pub steps: usize,
    pub termination: Termination,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DamperInfo {
    Off,
    Uniform { value: f64 },
    Cutoff(CutoffGeometry),
}

impl From<&Damper> for DamperInfo {
    fn from(d: &Damper) -> Self {
        match d {
            Damper::Off => DamperInfo::Off,
            Damper::Uniform(value) => DamperInfo::Uniform { value: *value },
            Damper::Cutoff(chi) => DamperInfo::Cutoff(chi.geometry()),
        }
    }
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn tracked(&self, quantity: Tracked) -> Option<&[f64]> {
        self.tracked
            .iter()
            .find(|t| t.quantity == quantity)
            .map(|t| t.values.as_slice())
    }

    /// `d/dt ‖v‖_0²` at each sample.
    pub fn l2_rate(&self) -> Vec<f64> {
        let sq: Vec<f64> = self.l2_norm.iter().map(|n| n * n).collect();
        derivative(&sq, self.sample_spacing())
    }

    pub fn energy_rate(&self) -> Vec<f64> {
        derivative(&self.energy, self.sample_spacing())
    }

    fn sample_spacing(&self) -> f64 {
        if self.times.len() < 2 {
            1.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    /// Largest identity residual relative to the largest predicted rate.
    pub fn relative_identity_residual(&self) -> f64 {
        let scale = self
            .dissipation
            .iter()
            .zip(&self.transport)
            .map(|(d, t)| (d + t).abs())
            .fold(0.0, f64::max);
        let worst = self.identity_residual.iter().copied().fold(0.0, f64::max);
        if scale == 0.0 {
            worst
        } else {
            worst / scale
        }
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "t,l2_norm,sob_sigma_norm,energy,dissipation,identity_residual")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                self.times[i], self.l2_norm[i], self.sob_sigma_norm[i], self.energy[i], self.dissipation[i], self.identity_residual[i]
            )?;
        }
        Ok(())
    }

    pub fn sidecar(&self, params: &ModelParams, stepper: &StepperConfig, k_max: usize, seed: u64) -> Sidecar {
        Sidecar {
            alpha: params.alpha,
            eps: params.eps,
            n_smooth: params.n_smooth,
            damper: DamperInfo::from(&params.damper),
            transport: params.transport,
            flavor: params.flavor.name().to_owned(),
            sigma: params.sigma,
            dealias: params.dealias,
            k_max,
            seed,
            stepper: stepper.clone(),
            step: self.step,
            steps: self.steps,
            termination: self.termination,
        }
    }
}

/// First derivative of uniformly spaced samples: fourth-order centred
/// differences inside, fourth-order one-sided five-point stencils at the
/// two points nearest each end. Short series fall back to lower order.
pub fn derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        2..=4 => (0..n)
            .map(|i| {
                if i == 0 {
                    (f[1] - f[0]) / h
                } else if i == n - 1 {
                    (f[n - 1] - f[n - 2]) / h
                } else {
                    (f[i + 1] - f[i - 1]) / (2.0 * h)
                }
            })
            .collect(),
        _ => (0..n)
            .map(|i| {
                let d = if i == 0 {
                    -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]
                } else if i == 1 {
                    -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]
                } else if i == n - 2 {
                    3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]
                } else if i == n - 1 {
                    25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]
                } else {
                    f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]
                };
                d / (12.0 * h)
            })
            .collect(),
    }
}

/// Runs with the standard diagnostics only.
pub fn simulate(v0: &SpectralField, params: &ModelParams, stepper: &StepperConfig) -> Result<TrajectoryRecord> {
    simulate_tracking(v0, params, stepper, &[])
}

/// Runs to `t_end`, sampling every `stride` steps, plus the `extra`
/// quantities. Blow-up ends the record early with a `nonfinite` termination
/// rather than an error.
pub fn simulate_tracking(v0: &SpectralField, params: &ModelParams, stepper: &StepperConfig, extra: &[Tracked]) -> Result<TrajectoryRecord> {
    params.validate()?;
    stepper.validate()?;
    v0.validate()?;
    let (n_steps, h) = stepper.plan(params.eps);
    let mut rec = TrajectoryRecord {
        times: Vec::new(),
        l2_norm: Vec::new(),
        sob_sigma_norm: Vec::new(),
        energy: Vec::new(),
        energy_damping: Vec::new(),
        energy_transport: Vec::new(),
        dissipation: Vec::new(),
        transport: Vec::new(),
        identity_residual: Vec::new(),
        tracked: extra
            .iter()
            .map(|&quantity| TrackedNorm {
                quantity,
                values: Vec::new(),
            })
            .collect(),
        termination: Termination::Completed,
        step: h,
        steps: 0,
        final_state: None,
    };
    sample(&mut rec, 0.0, v0, params)?;
    if n_steps > 0 {
        let mut it = Integrator::new(v0.clone(), params.clone(), stepper.scheme, h)?;
        for n in 1..=n_steps {
            match it.step() {
                Ok(()) => {}
                Err(Error::BlowUp { time, .. }) => {
                    rec.termination = Termination::Nonfinite { time };
                    break;
                }
                Err(e) => return Err(e),
            }
            rec.steps = n;
            if n % stepper.stride == 0 {
                sample(&mut rec, it.time(), &it.state(), params)?;
            }
        }
        rec.final_state = Some(it.state());
    } else {
        rec.final_state = Some(v0.clone());
    }
    let rates = rec.l2_rate();
    rec.identity_residual = rates
        .iter()
        .zip(rec.dissipation.iter().zip(&rec.transport))
        .map(|(r, (d, t))| (TAU * r - t - d).abs())
        .collect();
    Ok(rec)
}

fn sample(rec: &mut TrajectoryRecord, t: f64, v: &SpectralField, params: &ModelParams) -> Result<()> {
    rec.times.push(t);
    rec.l2_norm.push(sobolev_norm(v, 0.0));
    rec.sob_sigma_norm.push(sobolev_norm(v, params.sigma));
    rec.energy.push(energy(v, params)?);
    let rate = energy_rate(v, params)?;
    rec.energy_damping.push(rate.damping);
    rec.energy_transport.push(rate.transport);
    rec.dissipation.push(dissipation_rate(v, params));
    rec.transport.push(transport_rate(v, params));
    for tracked in &mut rec.tracked {
        tracked.values.push(tracked.quantity.measure(v, params));
    }
    Ok(())
}
