//! Run configuration and its line-oriented text format.
//!
//! ```text
//! # comment
//! [run]
//! experiment = energy-grav
//! seed = 3
//!
//! [model]
//! eps = 0.05
//! ```
//!
//! Keys are unique across sections. A key may appear before any header, but
//! under a header it must belong to that section. Lists are comma
//! separated. Every key has a default, and defaults depend on the
//! experiment (see [`RunConfig::defaults`]).

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::commutator::{LemmaId, DENSE_MAX_K};
use crate::error::{Error, Result};
use crate::generate::{Generator, WavePacket};
use crate::integrator::{Scheme, StepperConfig};
use crate::model::{CutoffChi, CutoffGeometry, Damper, EnergyFlavor, ModelParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    LinearDecay,
    SobolevDecay,
    NonlinearL2,
    EnergyCap,
    EnergyCapAlt,
    EnergyGrav,
    LifespanSweep,
    CommutatorSuite,
    BernsteinSuite,
    OracleCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::LinearDecay,
        Experiment::SobolevDecay,
        Experiment::NonlinearL2,
        Experiment::EnergyCap,
        Experiment::EnergyCapAlt,
        Experiment::EnergyGrav,
        Experiment::LifespanSweep,
        Experiment::CommutatorSuite,
        Experiment::BernsteinSuite,
        Experiment::OracleCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::LinearDecay => "linear-decay",
            Experiment::SobolevDecay => "sobolev-decay",
            Experiment::NonlinearL2 => "nonlinear-l2",
            Experiment::EnergyCap => "energy-cap",
            Experiment::EnergyCapAlt => "energy-cap-alt",
            Experiment::EnergyGrav => "energy-grav",
            Experiment::LifespanSweep => "lifespan-sweep",
            Experiment::CommutatorSuite => "commutator-suite",
            Experiment::BernsteinSuite => "bernstein-suite",
            Experiment::OracleCheck => "oracle-check",
        }
    }

    /// The energy flavor an energy experiment is tied to.
    pub fn required_flavor(self) -> Option<EnergyFlavor> {
        match self {
            Experiment::EnergyCap => Some(EnergyFlavor::CapTime),
            Experiment::EnergyCapAlt => Some(EnergyFlavor::CapPl),
            Experiment::EnergyGrav => Some(EnergyFlavor::GravPl),
            _ => None,
        }
    }

    fn linear(self) -> bool {
        matches!(self, Experiment::LinearDecay | Experiment::SobolevDecay)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                format!("unknown experiment {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingKind {
    Off,
    Uniform,
    Cutoff,
}

impl DampingKind {
    fn name(self) -> &'static str {
        match self {
            DampingKind::Off => "off",
            DampingKind::Uniform => "uniform",
            DampingKind::Cutoff => "cutoff",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Random,
    Packet,
    Mode,
}

impl GeneratorKind {
    fn name(self) -> &'static str {
        match self {
            GeneratorKind::Random => "random",
            GeneratorKind::Packet => "packet",
            GeneratorKind::Mode => "mode",
        }
    }
}

/// Which ratio suites `commutator-suite` runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LemmaChoice {
    /// The standard set plus the algebra suite.
    All,
    One(LemmaId),
}

impl fmt::Display for LemmaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LemmaChoice::All => f.write_str("all"),
            LemmaChoice::One(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSettings {
    pub alpha: f64,
    pub eps: f64,
    pub n_smooth: u32,
    pub sigma: f64,
    pub flavor: EnergyFlavor,
    pub transport: bool,
    pub dealias: bool,
    pub damping: DampingKind,
    /// Cutoff geometry; its amplitude doubles as the uniform damping value.
    pub cutoff: CutoffGeometry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSettings {
    pub generator: GeneratorKind,
    pub packet: WavePacket,
    pub mode: i64,
}

impl DataSettings {
    pub fn generator(&self) -> Generator {
        match self.generator {
            GeneratorKind::Random => Generator::Random,
            GeneratorKind::Packet => Generator::Packet(self.packet),
            GeneratorKind::Mode => Generator::Mode { wavenumber: self.mode },
        }
    }
}

/// Parameters of the ε sweeps, lifespan probes and operator suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudySettings {
    pub eps_values: Vec<f64>,
    pub theta: f64,
    pub t_max: f64,
    pub lemma: LemmaChoice,
    pub power: usize,
    pub s: f64,
    pub r: f64,
    pub ensemble: usize,
    pub p_min: u32,
    pub p_max: u32,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    /// Empty when no sweep is configured.
    pub param: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub k_max: usize,
    pub resolutions: Vec<usize>,
    pub out_dir: PathBuf,
    pub model: ModelSettings,
    pub stepper: StepperConfig,
    pub data: DataSettings,
    pub study: StudySettings,
    pub sweep: SweepSettings,
}

/// A parsed configuration and the keys that were left at their defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedConfig {
    pub config: RunConfig,
    pub defaulted: Vec<String>,
}

/// `(section, key, description)` for every recognised key.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("run", "experiment", "experiment name"),
    ("run", "seed", "base random seed"),
    ("run", "k_max", "band limit K"),
    ("run", "resolutions", "band limits for resolution studies"),
    ("run", "out_dir", "output directory"),
    ("model", "alpha", "dispersion order α ∈ (0, 2]"),
    ("model", "eps", "small parameter ε ∈ (0, 1]"),
    ("model", "n_smooth", "smoothing order N of W"),
    ("model", "sigma", "data regularity σ"),
    ("model", "flavor", "energy flavor: cap_time, cap_PL, grav_PL"),
    ("model", "transport", "whether W(v)∂ₓv is included"),
    ("model", "dealias", "pad products to avoid aliasing"),
    ("model", "damping", "off, uniform or cutoff"),
    ("model", "cutoff_a", "left end of the damping plateau"),
    ("model", "cutoff_b", "right end of the damping plateau"),
    ("model", "cutoff_delta", "width of the smooth ramps"),
    ("model", "damping_amplitude", "plateau height, or the uniform value"),
    ("stepper", "scheme", "lawson_rk4 or dense_splitting"),
    ("stepper", "dt", "requested time step"),
    ("stepper", "safety", "step never exceeds safety·ε"),
    ("stepper", "t_end", "final time"),
    ("stepper", "stride", "sampling stride in steps"),
    ("data", "generator", "random, packet or mode"),
    ("data", "packet_center", "wave packet centre"),
    ("data", "packet_width", "wave packet width"),
    ("data", "packet_wavenumber", "wave packet carrier (integer)"),
    ("data", "packet_phase", "wave packet carrier phase"),
    ("data", "mode", "wavenumber of the single-mode generator"),
    ("study", "eps_values", "ε values of sweep-style experiments"),
    ("study", "theta", "lifespan threshold factor θ > 1"),
    ("study", "t_max", "lifespan time limit"),
    ("study", "lemma", "commutator suite: all, L3.1, L3.2, L3.4 or A.2"),
    ("study", "power", "operator power k"),
    ("study", "s", "Sobolev index s of the suite"),
    ("study", "r", "Sobolev index r of the multiplier"),
    ("study", "ensemble", "ensemble size"),
    ("study", "p_min", "smallest Bernstein dyadic index"),
    ("study", "p_max", "largest Bernstein dyadic index"),
    ("study", "samples", "random inputs per oracle comparison"),
    ("sweep", "param", "key varied by the sweep command"),
    ("sweep", "values", "values taken by the swept key"),
];

fn section_of(key: &str) -> Option<&'static str> {
    KEYS.iter().find(|(_, k, _)| *k == key).map(|(s, _, _)| *s)
}

fn value<T: FromStr>(key: &str, raw: &str, what: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::config(key, format!("expected {what}, got {raw:?}")))
}

fn float(key: &str, raw: &str) -> Result<f64> {
    let x: f64 = value(key, raw, "a number")?;
    if !x.is_finite() {
        return Err(Error::config(key, format!("{raw:?} is not finite")));
    }
    Ok(x)
}

fn boolean(key: &str, raw: &str) -> Result<bool> {
    match raw {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::config(key, format!("expected true or false, got {raw:?}"))),
    }
}

fn list(raw: &str) -> Vec<&str> {
    raw.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

impl RunConfig {
    /// Documented defaults. Shared by every experiment: α = 3/2, ε = 0.1,
    /// N = 4, K = 128, seed 0, cutoff damping on `[π/2, 3π/2]`, random data.
    /// Per experiment:
    /// - `linear-decay`, `sobolev-decay`: transport off, steps of ε/4000
    ///   sampled every fourth step.
    /// - `nonlinear-l2` and the energy experiments: wave packet data with
    ///   carrier phase −π/2, steps of ε/1000 (`dt = 1`, `safety = 0.001`).
    /// - `energy-cap` / `energy-cap-alt`: flavor `cap_time` / `cap_PL`.
    /// - `energy-grav`: α = 1/2, σ = 2, flavor `grav_PL`.
    /// - `lifespan-sweep`: damping off, single-mode data at `k = 1`, K = 32,
    ///   dt = 0.1, `t_max` = 10⁴, ε ∈ {0.2, 0.1, 0.05, 0.025}.
    /// - `bernstein-suite`: K = 64.
    /// - `oracle-check`: K = 16.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = RunConfig {
            experiment,
            seed: 0,
            k_max: 128,
            resolutions: vec![32, 64, 128, 256],
            out_dir: PathBuf::from("dampwave-out"),
            model: ModelSettings {
                alpha: 1.5,
                eps: 0.1,
                n_smooth: 4,
                sigma: 3.0,
                flavor: EnergyFlavor::CapTime,
                transport: true,
                dealias: true,
                damping: DampingKind::Cutoff,
                cutoff: CutoffGeometry::default(),
            },
            stepper: StepperConfig::default(),
            data: DataSettings {
                generator: GeneratorKind::Random,
                packet: WavePacket::default(),
                mode: 1,
            },
            study: StudySettings {
                eps_values: vec![0.1, 0.05, 0.025],
                theta: 2.0,
                t_max: 1e4,
                lemma: LemmaChoice::All,
                power: 1,
                s: 0.0,
                r: 2.0,
                ensemble: 100,
                p_min: 0,
                p_max: 4,
                samples: 50,
            },
            sweep: SweepSettings {
                param: String::new(),
                values: Vec::new(),
            },
        };
        match experiment {
            Experiment::LinearDecay | Experiment::SobolevDecay => {
                cfg.model.transport = false;
                cfg.stepper.dt = 1.0;
                cfg.stepper.safety = 2.5e-4;
                cfg.stepper.stride = 4;
            }
            Experiment::NonlinearL2 | Experiment::EnergyCap | Experiment::EnergyCapAlt | Experiment::EnergyGrav => {
                cfg.data.generator = GeneratorKind::Packet;
                cfg.data.packet.phase = -std::f64::consts::FRAC_PI_2;
                cfg.stepper.dt = 1.0;
                cfg.stepper.safety = 0.001;
                match experiment {
                    Experiment::EnergyCapAlt => cfg.model.flavor = EnergyFlavor::CapPl,
                    Experiment::EnergyGrav => {
                        cfg.model.alpha = 0.5;
                        cfg.model.sigma = 2.0;
                        cfg.model.flavor = EnergyFlavor::GravPl;
                    }
                    _ => {}
                }
            }
            Experiment::LifespanSweep => {
                cfg.model.damping = DampingKind::Off;
                cfg.data.generator = GeneratorKind::Mode;
                cfg.k_max = 32;
                cfg.stepper.dt = 0.1;
                cfg.study.eps_values = vec![0.2, 0.1, 0.05, 0.025];
            }
            Experiment::BernsteinSuite => cfg.k_max = 64,
            Experiment::OracleCheck => cfg.k_max = 16,
            _ => {}
        }
        cfg
    }

    /// Assigns one key from its text form.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let raw = raw.trim();
        match key {
            "experiment" => {
                let e: Experiment = raw.parse().map_err(|m| Error::config(key, m))?;
                if e != self.experiment {
                    return Err(Error::config(key, "the experiment cannot change after defaults are applied"));
                }
            }
            "seed" => self.seed = value(key, raw, "an unsigned integer")?,
            "k_max" => self.k_max = value(key, raw, "an unsigned integer")?,
            "resolutions" => {
                self.resolutions = list(raw)
                    .into_iter()
                    .map(|v| value(key, v, "a list of unsigned integers"))
                    .collect::<Result<_>>()?
            }
            "out_dir" => self.out_dir = PathBuf::from(raw),
            "alpha" => self.model.alpha = float(key, raw)?,
            "eps" => self.model.eps = float(key, raw)?,
            "n_smooth" => self.model.n_smooth = value(key, raw, "a positive integer")?,
            "sigma" => self.model.sigma = float(key, raw)?,
            "flavor" => self.model.flavor = raw.parse().map_err(|e: Error| Error::config(key, e.to_string()))?,
            "transport" => self.model.transport = boolean(key, raw)?,
            "dealias" => self.model.dealias = boolean(key, raw)?,
            "damping" => {
                self.model.damping = match raw {
                    "off" => DampingKind::Off,
                    "uniform" => DampingKind::Uniform,
                    "cutoff" => DampingKind::Cutoff,
                    _ => return Err(Error::config(key, format!("expected off, uniform or cutoff, got {raw:?}"))),
                }
            }
            "cutoff_a" => self.model.cutoff.a = float(key, raw)?,
            "cutoff_b" => self.model.cutoff.b = float(key, raw)?,
            "cutoff_delta" => self.model.cutoff.delta = float(key, raw)?,
            "damping_amplitude" => self.model.cutoff.amplitude = float(key, raw)?,
            "scheme" => {
                self.stepper.scheme = raw
                    .parse::<Scheme>()
                    .map_err(|e| Error::config(key, e.to_string()))?
            }
            "dt" => self.stepper.dt = float(key, raw)?,
            "safety" => self.stepper.safety = float(key, raw)?,
            "t_end" => self.stepper.t_end = float(key, raw)?,
            "stride" => self.stepper.stride = value(key, raw, "a positive integer")?,
            "generator" => {
                self.data.generator = match raw {
                    "random" => GeneratorKind::Random,
                    "packet" => GeneratorKind::Packet,
                    "mode" => GeneratorKind::Mode,
                    _ => return Err(Error::config(key, format!("expected random, packet or mode, got {raw:?}"))),
                }
            }
            "packet_center" => self.data.packet.center = float(key, raw)?,
            "packet_width" => self.data.packet.width = float(key, raw)?,
            "packet_wavenumber" => self.data.packet.wavenumber = float(key, raw)?,
            "packet_phase" => self.data.packet.phase = float(key, raw)?,
            "mode" => self.data.mode = value(key, raw, "an integer")?,
            "eps_values" => {
                self.study.eps_values = list(raw)
                    .into_iter()
                    .map(|v| float(key, v))
                    .collect::<Result<_>>()?
            }
            "theta" => self.study.theta = float(key, raw)?,
            "t_max" => self.study.t_max = float(key, raw)?,
            "lemma" => {
                self.study.lemma = if raw == "all" {
                    LemmaChoice::All
                } else {
                    LemmaChoice::One(raw.parse().map_err(|e: Error| Error::config(key, e.to_string()))?)
                }
            }
            "power" => self.study.power = value(key, raw, "an unsigned integer")?,
            "s" => self.study.s = float(key, raw)?,
            "r" => self.study.r = float(key, raw)?,
            "ensemble" => self.study.ensemble = value(key, raw, "an unsigned integer")?,
            "p_min" => self.study.p_min = value(key, raw, "an unsigned integer")?,
            "p_max" => self.study.p_max = value(key, raw, "an unsigned integer")?,
            "samples" => self.study.samples = value(key, raw, "an unsigned integer")?,
            "param" => self.sweep.param = raw.to_owned(),
            "values" => self.sweep.values = list(raw).into_iter().map(str::to_owned).collect(),
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Checks every invariant, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if !(m.alpha > 0.0 && m.alpha <= 2.0) {
            return Err(Error::config("alpha", format!("α ∈ (0, 2] violated by {}", m.alpha)));
        }
        if !(m.eps > 0.0 && m.eps <= 1.0) {
            return Err(Error::config("eps", format!("ε ∈ (0, 1] violated by {}", m.eps)));
        }
        if m.n_smooth == 0 {
            return Err(Error::config("n_smooth", "N ≥ 1 required"));
        }
        if let Some(flavor) = self.experiment.required_flavor() {
            if m.flavor != flavor {
                return Err(Error::config("flavor", format!("{} runs with flavor {flavor}", self.experiment)));
            }
        }
        if m.sigma < m.flavor.min_sigma() {
            return Err(Error::config(
                "sigma",
                format!("flavor {} needs σ ≥ {}, got {}", m.flavor, m.flavor.min_sigma(), m.sigma),
            ));
        }
        if self.experiment.linear() && m.transport {
            return Err(Error::config("transport", format!("{} requires transport = false", self.experiment)));
        }
        if self.experiment == Experiment::SobolevDecay && m.sigma < 2.0 * m.alpha {
            return Err(Error::config("sigma", format!("σ ≥ 2α required to track ‖v‖_2α, got σ = {}", m.sigma)));
        }
        match m.damping {
            DampingKind::Cutoff => {
                CutoffChi::from_geometry(m.cutoff, 1).map_err(|e| Error::config("cutoff_a", e.to_string()))?;
            }
            DampingKind::Uniform if !(m.cutoff.amplitude >= 0.0) => {
                return Err(Error::config("damping_amplitude", "uniform damping must be non-negative"));
            }
            _ => {}
        }
        if self.k_max == 0 {
            return Err(Error::config("k_max", "K ≥ 1 required"));
        }
        if self.experiment == Experiment::OracleCheck && self.k_max > DENSE_MAX_K {
            return Err(Error::config("k_max", format!("dense oracle limited to K ≤ {DENSE_MAX_K}")));
        }
        if self.resolutions.is_empty() || self.resolutions.contains(&0) {
            return Err(Error::config("resolutions", "need at least one positive band limit"));
        }
        self.stepper
            .validate()
            .map_err(|e| Error::config(stepper_key(&self.stepper), e.to_string()))?;
        self.data
            .packet
            .validate()
            .map_err(|e| Error::config("packet_width", e.to_string()))?;
        if self.data.packet.wavenumber.fract() != 0.0 {
            return Err(Error::config("packet_wavenumber", "carrier must be an integer"));
        }
        if self.data.mode.unsigned_abs() as usize > self.k_max {
            return Err(Error::config("mode", format!("|mode| ≤ K = {} required", self.k_max)));
        }
        let st = &self.study;
        if st.eps_values.is_empty() || st.eps_values.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err(Error::config("eps_values", "need values in (0, 1]"));
        }
        if !(st.theta > 1.0) {
            return Err(Error::config("theta", format!("θ > 1 violated by {}", st.theta)));
        }
        if !(st.t_max > 0.0) {
            return Err(Error::config("t_max", "must be positive"));
        }
        if st.ensemble == 0 {
            return Err(Error::config("ensemble", "must be at least 1"));
        }
        if st.samples == 0 {
            return Err(Error::config("samples", "must be at least 1"));
        }
        if st.p_min > st.p_max {
            return Err(Error::config("p_min", "p_min ≤ p_max required"));
        }
        if !self.sweep.param.is_empty() && section_of(&self.sweep.param).is_none() {
            return Err(Error::config("param", format!("{:?} is not a configuration key", self.sweep.param)));
        }
        Ok(())
    }

    /// The model at band `k_max`.
    pub fn model_params(&self, k_max: usize) -> Result<ModelParams> {
        self.model_params_at(self.model.eps, k_max)
    }

    pub fn model_params_at(&self, eps: f64, k_max: usize) -> Result<ModelParams> {
        let m = &self.model;
        let damper = match m.damping {
            DampingKind::Off => Damper::Off,
            DampingKind::Uniform => Damper::Uniform(m.cutoff.amplitude),
            DampingKind::Cutoff => Damper::Cutoff(CutoffChi::from_geometry(m.cutoff, k_max)?),
        };
        let params = ModelParams {
            alpha: m.alpha,
            eps,
            n_smooth: m.n_smooth,
            damper,
            transport: m.transport,
            flavor: m.flavor,
            sigma: m.sigma,
            dealias: m.dealias,
        };
        params.validate()?;
        Ok(params)
    }
}

fn stepper_key(s: &StepperConfig) -> &'static str {
    if !(s.dt > 0.0) {
        "dt"
    } else if !(s.safety > 0.0 && s.safety <= 1.0) {
        "safety"
    } else if s.stride == 0 {
        "stride"
    } else {
        "t_end"
    }
}

/// Reads a configuration document.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    build(entries(text)?)
}

fn entries(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    let mut section: Option<String> = None;
    let mut seen = BTreeSet::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::config(line, format!("line {}: unterminated section header", n + 1)))?
                .trim();
            if !KEYS.iter().any(|(s, _, _)| *s == name) {
                return Err(Error::config(name, format!("line {}: unknown section", n + 1)));
            }
            section = Some(name.to_owned());
            continue;
        }
        let (key, raw) = line
            .split_once('=')
            .ok_or_else(|| Error::config(line, format!("line {}: expected key = value", n + 1)))?;
        let key = key.trim();
        let home = section_of(key).ok_or_else(|| Error::config(key, "unknown key"))?;
        if let Some(s) = &section {
            if s != home {
                return Err(Error::config(key, format!("belongs in [{home}], found in [{s}]")));
            }
        }
        if !seen.insert(key.to_owned()) {
            return Err(Error::config(key, "given more than once"));
        }
        entries.push((key.to_owned(), raw.trim().to_owned()));
    }
    Ok(entries)
}

/// Applies `key=value` overrides on top of a document, as `--set` does.
pub fn parse_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<ParsedConfig> {
    let mut entries = entries(text)?;
    for (key, raw) in overrides {
        let key = key.rsplit('.').next().unwrap_or(key).trim();
        if section_of(key).is_none() {
            return Err(Error::config(key, "unknown key"));
        }
        entries.retain(|(k, _)| k != key);
        entries.push((key.to_owned(), raw.clone()));
    }
    build(entries)
}

fn build(entries: Vec<(String, String)>) -> Result<ParsedConfig> {
    let experiment = match entries.iter().find(|(k, _)| k == "experiment") {
        Some((k, raw)) => raw.parse::<Experiment>().map_err(|m| Error::config(k, m))?,
        None => Experiment::LinearDecay,
    };
    let mut config = RunConfig::defaults(experiment);
    for (key, raw) in &entries {
        config.set(key, raw)?;
    }
    config.validate()?;
    let given: BTreeSet<&str> = entries.iter().map(|(k, _)| k.as_str()).collect();
    let defaulted = KEYS
        .iter()
        .map(|(_, k, _)| *k)
        .filter(|k| !given.contains(k))
        .map(str::to_owned)
        .collect();
    Ok(ParsedConfig { config, defaulted })
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Writes every key, so that [`parse_config`] reproduces `cfg` exactly.
pub fn emit_config(cfg: &RunConfig) -> String {
    let m = &cfg.model;
    let st = &cfg.study;
    let sections: [(&str, Vec<(&str, String)>); 6] = [
        (
            "run",
            vec![
                ("experiment", cfg.experiment.to_string()),
                ("seed", cfg.seed.to_string()),
                ("k_max", cfg.k_max.to_string()),
                ("resolutions", join(&cfg.resolutions)),
                ("out_dir", cfg.out_dir.display().to_string()),
            ],
        ),
        (
            "model",
            vec![
                ("alpha", num(m.alpha)),
                ("eps", num(m.eps)),
                ("n_smooth", m.n_smooth.to_string()),
                ("sigma", num(m.sigma)),
                ("flavor", m.flavor.to_string()),
                ("transport", m.transport.to_string()),
                ("dealias", m.dealias.to_string()),
                ("damping", m.damping.name().to_owned()),
                ("cutoff_a", num(m.cutoff.a)),
                ("cutoff_b", num(m.cutoff.b)),
                ("cutoff_delta", num(m.cutoff.delta)),
                ("damping_amplitude", num(m.cutoff.amplitude)),
            ],
        ),
        (
            "stepper",
            vec![
                ("scheme", cfg.stepper.scheme.to_string()),
                ("dt", num(cfg.stepper.dt)),
                ("safety", num(cfg.stepper.safety)),
                ("t_end", num(cfg.stepper.t_end)),
                ("stride", cfg.stepper.stride.to_string()),
            ],
        ),
        (
            "data",
            vec![
                ("generator", cfg.data.generator.name().to_owned()),
                ("packet_center", num(cfg.data.packet.center)),
                ("packet_width", num(cfg.data.packet.width)),
                ("packet_wavenumber", num(cfg.data.packet.wavenumber)),
                ("packet_phase", num(cfg.data.packet.phase)),
                ("mode", cfg.data.mode.to_string()),
            ],
        ),
        (
            "study",
            vec![
                ("eps_values", st.eps_values.iter().map(|e| num(*e)).collect::<Vec<_>>().join(", ")),
                ("theta", num(st.theta)),
                ("t_max", num(st.t_max)),
                ("lemma", st.lemma.to_string()),
                ("power", st.power.to_string()),
                ("s", num(st.s)),
                ("r", num(st.r)),
                ("ensemble", st.ensemble.to_string()),
                ("p_min", st.p_min.to_string()),
                ("p_max", st.p_max.to_string()),
                ("samples", st.samples.to_string()),
            ],
        ),
        (
            "sweep",
            vec![("param", cfg.sweep.param.clone()), ("values", cfg.sweep.values.join(", "))],
        ),
    ];
    let mut out = String::new();
    for (i, (name, keys)) in sections.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "[{name}]");
        for (k, v) in keys {
            let _ = writeln!(out, "{k} = {v}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let parsed = parse_config("").unwrap();
        let c = &parsed.config;
        assert_eq!(c.experiment, Experiment::LinearDecay);
        assert_eq!((c.model.alpha, c.model.eps, c.model.n_smooth, c.k_max, c.seed), (1.5, 0.1, 4, 128, 0));
        assert_eq!(parsed.defaulted.len(), KEYS.len());
    }

    #[test]
    fn every_key_is_emitted_once() {
        let text = emit_config(&RunConfig::defaults(Experiment::EnergyGrav));
        for (_, key, _) in KEYS {
            let n = text.lines().filter(|l| l.split('=').next().unwrap().trim() == *key).count();
            assert_eq!(n, 1, "{key}");
        }
    }

    #[test]
    fn rejects_bad_documents() {
        let err = |doc: &str| match parse_config(doc) {
            Err(Error::Config { key, message }) => (key, message),
            other => panic!("{doc:?} gave {other:?}"),
        };
        assert_eq!(err("alpha = 0").0, "alpha");
        assert_eq!(err("bogus = 1").0, "bogus");
        assert_eq!(err("[model]\nseed = 3").0, "seed");
        assert_eq!(err("eps = 0.1\neps = 0.2").0, "eps");
        assert_eq!(err("[nowhere]").0, "nowhere");
        assert_eq!(err("eps = x").0, "eps");
        assert_eq!(err("experiment = energy-grav\nsigma = 1.5").0, "sigma");
        assert_eq!(err("experiment = energy-grav\nflavor = cap_time").0, "flavor");
        assert_eq!(err("transport = true").0, "transport");
        assert_eq!(err("experiment = oracle-check\nk_max = 65").0, "k_max");
        assert_eq!(err("just text").1, "line 1: expected key = value");
    }

    #[test]
    fn experiment_defaults_and_provenance() {
        let doc = "# gravity\n[run]\nexperiment = energy-grav\n\n[model]\neps = 0.05\n";
        let parsed = parse_config(doc).unwrap();
        let c = &parsed.config;
        assert_eq!((c.model.alpha, c.model.sigma, c.model.flavor), (0.5, 2.0, EnergyFlavor::GravPl));
        assert_eq!(c.model.eps, 0.05);
        assert!(!parsed.defaulted.contains(&"eps".to_owned()));
        assert!(parsed.defaulted.contains(&"alpha".to_owned()));
    }

    #[test]
    fn overrides_replace_document_values() {
        let parsed = parse_with_overrides(
            "experiment = nonlinear-l2\neps = 0.05\nseed = 4",
            &[("model.eps".into(), "0.2".into()), ("k_max".into(), "64".into())],
        )
        .unwrap();
        assert_eq!(parsed.config.model.eps, 0.2);
        assert_eq!(parsed.config.k_max, 64);
        assert_eq!(parsed.config.seed, 4);
        assert_eq!(parsed.config.experiment, Experiment::NonlinearL2);
        assert!(parse_with_overrides("", &[("nope".into(), "1".into())]).is_err());
    }
}
