//! The experiment registry: each experiment is a typed study function plus
//! the verdicts [`run`] derives from it and the files it writes.

use std::f64::consts::TAU;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::baselines::{Baselines, BASELINE_TOLERANCE};
use super::config::{emit_config, Experiment, LemmaChoice, ParsedConfig, RunConfig};
use crate::commutator::{
    bernstein_suite, commutator_l_f, commutator_pl_dx, commutator_pl_f, dense_operator, dense_rhs, ratio_suite,
    standard_suites, CommutatorReport, FunctionEnv, LemmaId, OperatorExpr, SuiteParams, SuiteSpec, GROWTH_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::generate::{gaussian_profile, real_profile, rng};
use crate::integrator::{
    lifespan_probe, loglog_slope, simulate_tracking, LifespanCause, LifespanResult, Termination, Tracked, TrajectoryRecord,
};
use crate::model::{apply_pl, dispersion, rhs, z_pl_power, ModelParams};
use crate::spectral::SpectralField;

/// Per-sample slack on `‖v(t_n)‖_0` monotonicity.
pub const L2_SLACK: f64 = 1e-9;
/// Bound on the relative residual of the L² dissipation identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-4;
/// Per-sample slack on `‖v(t_n)‖_{kα}` monotonicity.
pub const SOBOLEV_SLACK: f64 = 1e-8;
/// Largest allowed max/min spread of a Grönwall constant across ε.
pub const QUOTIENT_SPREAD: f64 = 2.0;
/// Largest allowed sampling error of a finite-difference quotient,
/// relative to the largest exact quotient magnitude.
pub const SAMPLING_TOLERANCE: f64 = 0.01;
/// The fitted `log T_ε` vs `log ε` slope must not exceed this.
pub const LIFESPAN_SLOPE: f64 = -0.9;
/// Relative tolerance of the spectral vs dense operator comparison.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    UsageError,
    BlowUp,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::UsageError => 2,
            Status::BlowUp => 3,
        }
    }

    pub fn from_exit_code(code: i32) -> Status {
        match code {
            0 => Status::Pass,
            1 => Status::Fail,
            3 => Status::BlowUp,
            _ => Status::UsageError,
        }
    }
}

/// Exit status for an error escaping an experiment.
pub fn error_status(e: &Error) -> Status {
    match e {
        Error::BlowUp { .. } | Error::NonFinite(_) => Status::BlowUp,
        _ => Status::UsageError,
    }
}

/// `value < limit` (strict) or `value ≤ limit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub strict: bool,
    pub pass: bool,
}

impl Verdict {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            strict: false,
            pass: value <= limit,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            strict: true,
            pass: value < limit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub name: String,
    pub value: f64,
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub status: Status,
    pub exit_code: i32,
    pub cause: Option<String>,
    pub verdicts: Vec<Verdict>,
    pub headline: Option<Headline>,
    pub slope: Option<f64>,
    pub diagnostics: Map<String, Value>,
    pub defaulted: Vec<String>,
    pub files: Vec<String>,
}

impl Summary {
    fn new(experiment: &str, defaulted: &[String]) -> Self {
        Self {
            experiment: experiment.to_owned(),
            status: Status::Pass,
            exit_code: 0,
            cause: None,
            verdicts: Vec::new(),
            headline: None,
            slope: None,
            diagnostics: Map::new(),
            defaulted: defaulted.to_vec(),
            files: Vec::new(),
        }
    }

    fn fail_with(&mut self, status: Status, cause: String) {
        self.status = status;
        self.exit_code = status.exit_code();
        self.cause = Some(cause);
    }

    fn settle(&mut self) {
        if self.status == Status::Pass && self.verdicts.iter().any(|v| !v.pass) {
            self.status = Status::Fail;
            let failed: Vec<_> = self.verdicts.iter().filter(|v| !v.pass).map(|v| v.name.as_str()).collect();
            self.cause = Some(format!("verdicts failed: {}", failed.join(", ")));
        }
        self.exit_code = self.status.exit_code();
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut w = BufWriter::new(File::create(dir.join("summary.json"))?);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    /// Summary for a run that never started.
    pub fn usage_error(experiment: &str, cause: String) -> Self {
        let mut s = Self::new(experiment, &[]);
        s.fail_with(Status::UsageError, cause);
        s
    }
}

/// Largest step-to-step increase of a sampled sequence (negative when
/// strictly decreasing).
pub fn max_increase(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(if values.len() < 2 { 0.0 } else { f64::NEG_INFINITY })
}

/// `max/min` of the clipped constants `max(c, 0)`: 1 when all vanish,
/// infinite when only some do.
pub fn spread(constants: &[f64]) -> f64 {
    let clipped: Vec<f64> = constants.iter().map(|c| c.max(0.0)).collect();
    let hi = clipped.iter().copied().fold(0.0, f64::max);
    let lo = clipped.iter().copied().fold(f64::INFINITY, f64::min);
    if hi == 0.0 {
        1.0
    } else if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

fn initial_data(cfg: &RunConfig, k_max: usize) -> Result<SpectralField> {
    cfg.data.generator().generate(k_max, cfg.model.sigma, cfg.seed)
}

/// A linear run (transport off) with `‖v‖_α`, `‖v‖_2α`, `‖P_L v‖_0` and
/// `‖P_L² v‖_0` tracked.
pub fn linear_run(cfg: &RunConfig) -> Result<(ModelParams, TrajectoryRecord)> {
    let params = cfg.model_params(cfg.k_max)?;
    let v0 = initial_data(cfg, cfg.k_max)?;
    let a = params.alpha;
    let extra = [
        Tracked::Sobolev(a),
        Tracked::Sobolev(2.0 * a),
        Tracked::PlPower(1),
        Tracked::PlPower(2),
    ];
    let rec = simulate_tracking(&v0, &params, &cfg.stepper, &extra)?;
    Ok((params, rec))
}

/// Per-ε outcome of a Grönwall quotient run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientRow {
    pub eps: f64,
    /// `sup_t Q` with `Q` from finite differences of the sampled quantity.
    pub sup_quotient: f64,
    /// `sup_t` of the transport part of the exact rate over the quantity.
    pub sup_transport_quotient: f64,
    /// `max_t |Q_fd − Q_exact| / max_t |Q_exact|`
    pub sampling_error: f64,
    /// Range of `E/‖v‖_σ²` along the run (energy experiments).
    pub energy_ratio: Option<(f64, f64)>,
    pub termination: Termination,
}

#[derive(Clone, Debug)]
pub struct QuotientStudy {
    pub rows: Vec<QuotientRow>,
    pub records: Vec<(f64, ModelParams, TrajectoryRecord)>,
}

impl QuotientStudy {
    pub fn constants(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.sup_quotient).collect()
    }

    pub fn transport_constants(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.sup_transport_quotient).collect()
    }

    pub fn max_sampling_error(&self) -> f64 {
        self.rows.iter().map(|r| r.sampling_error).fold(0.0, f64::max)
    }
}

/// Quotients of `‖v‖_0²` (when `energy` is false) or of the configured
/// energy, one run per `eps_values` entry, all from the same data.
pub fn quotient_study(cfg: &RunConfig, energy: bool) -> Result<QuotientStudy> {
    let v0 = initial_data(cfg, cfg.k_max)?;
    let runs: Vec<Result<(f64, ModelParams, TrajectoryRecord, QuotientRow)>> = cfg
        .study
        .eps_values
        .par_iter()
        .map(|&eps| {
            let params = cfg.model_params_at(eps, cfg.k_max)?;
            let rec = simulate_tracking(&v0, &params, &cfg.stepper, &[])?;
            let row = quotient_row(eps, &rec, energy)?;
            Ok((eps, params, rec, row))
        })
        .collect();
    let mut study = QuotientStudy {
        rows: Vec::new(),
        records: Vec::new(),
    };
    for run in runs {
        let (eps, params, rec, row) = run?;
        study.rows.push(row);
        study.records.push((eps, params, rec));
    }
    Ok(study)
}

fn quotient_row(eps: f64, rec: &TrajectoryRecord, energy: bool) -> Result<QuotientRow> {
    let (quantity, fd, exact, transport): (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) = if energy {
        (
            rec.energy.clone(),
            rec.energy_rate(),
            rec.energy_damping.iter().zip(&rec.energy_transport).map(|(d, t)| d + t).collect(),
            rec.energy_transport.clone(),
        )
    } else {
        (
            rec.l2_norm.iter().map(|n| n * n).collect(),
            rec.l2_rate(),
            rec.dissipation.iter().zip(&rec.transport).map(|(d, t)| (d + t) / TAU).collect(),
            rec.transport.iter().map(|t| t / TAU).collect(),
        )
    };
    let (mut sup_q, mut sup_t, mut worst, mut scale) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for i in 0..quantity.len() {
        let q = quantity[i];
        if !(q > 0.0) {
            continue;
        }
        sup_q = sup_q.max(fd[i] / q);
        sup_t = sup_t.max(transport[i] / q);
        worst = worst.max((fd[i] - exact[i]).abs() / q);
        scale = scale.max(exact[i].abs() / q);
    }
    if sup_q == f64::NEG_INFINITY {
        sup_q = 0.0;
        sup_t = 0.0;
    }
    let energy_ratio = if energy {
        let ratios: Vec<f64> = rec
            .energy
            .iter()
            .zip(&rec.sob_sigma_norm)
            .filter(|(_, n)| **n > 0.0)
            .map(|(e, n)| e / (n * n))
            .collect();
        ratios
            .iter()
            .copied()
            .fold(None, |acc: Option<(f64, f64)>, x| Some(acc.map_or((x, x), |(lo, hi)| (lo.min(x), hi.max(x)))))
    } else {
        None
    };
    Ok(QuotientRow {
        eps,
        sup_quotient: sup_q,
        sup_transport_quotient: sup_t,
        sampling_error: if scale > 0.0 { worst / scale } else { worst },
        energy_ratio,
        termination: rec.termination,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanStudy {
    pub results: Vec<LifespanResult>,
    pub slope: Option<f64>,
}

/// One lifespan probe per `eps_values` entry, all from the same profile.
pub fn lifespan_study(cfg: &RunConfig) -> Result<LifespanStudy> {
    let params = cfg.model_params(cfg.k_max)?;
    let profile = initial_data(cfg, cfg.k_max)?;
    let results: Vec<LifespanResult> = cfg
        .study
        .eps_values
        .par_iter()
        .map(|&eps| lifespan_probe(&params, &profile, eps, cfg.study.theta, cfg.study.t_max, &cfg.stepper))
        .collect::<Result<_>>()?;
    let slope = if results.len() >= 2 {
        let eps: Vec<f64> = results.iter().map(|r| r.eps).collect();
        let t: Vec<f64> = results.iter().map(|r| r.time).collect();
        Some(loglog_slope(&eps, &t)?)
    } else {
        None
    };
    Ok(LifespanStudy { results, slope })
}

/// Ratio suites selected by the `lemma` key.
pub fn commutator_study(cfg: &RunConfig) -> Result<Vec<CommutatorReport>> {
    let suites: Vec<(LemmaId, SuiteParams)> = match cfg.study.lemma {
        LemmaChoice::All => {
            let mut s = standard_suites();
            s.push((LemmaId::Algebra, SuiteParams::new(0, 0.0, 1.0, 0.0)));
            s
        }
        LemmaChoice::One(LemmaId::Bernstein) => {
            return Err(Error::config("lemma", "A.4 runs under the bernstein-suite experiment"));
        }
        LemmaChoice::One(lemma) => {
            let st = &cfg.study;
            vec![(lemma, SuiteParams::new(st.power, cfg.model.alpha, st.s, st.r))]
        }
    };
    suites
        .into_iter()
        .map(|(lemma, params)| {
            let spec = SuiteSpec {
                resolutions: cfg.resolutions.clone(),
                cutoff: cfg.model.cutoff,
                ..SuiteSpec::new(lemma, params, cfg.study.ensemble, cfg.seed)
            };
            ratio_suite(&spec)
        })
        .collect()
}

pub fn bernstein_study(cfg: &RunConfig) -> Result<CommutatorReport> {
    bernstein_suite(cfg.study.p_min..=cfg.study.p_max, cfg.study.ensemble, cfg.seed, cfg.k_max)
}

/// One spectral-vs-dense comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub operator: String,
    pub sample: usize,
    pub max_abs_diff: f64,
    pub scale: f64,
}

impl OracleRow {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_abs_diff / self.scale
        } else {
            self.max_abs_diff
        }
    }
}

/// Every operator applied through its production route and through the
/// dense matrix assembled from its definition, on `samples` random inputs.
pub fn oracle_study(cfg: &RunConfig) -> Result<Vec<OracleRow>> {
    let k = cfg.k_max;
    let params = cfg.model_params(k)?;
    let damper = params.damper.clone();
    let alpha = params.alpha;
    let env_base = FunctionEnv::new().with_damper(&damper, k);
    let (l, x, dx) = (
        OperatorExpr::Fractional(alpha),
        OperatorExpr::multiply(crate::commutator::CHI),
        OperatorExpr::Dx,
    );
    let pl = OperatorExpr::pl(alpha);
    let f_op = OperatorExpr::multiply("f");

    // Matrices that do not depend on the sample.
    let mut fixed: Vec<(String, crate::commutator::DenseOperator)> = vec![
        ("L".into(), dense_operator(&l, k, &env_base)?),
        ("chi".into(), dense_operator(&x, k, &env_base)?),
    ];
    for j in 1..=4 {
        let name = if j == 1 { "P_L".to_owned() } else { format!("P_L^{j}") };
        fixed.push((name, dense_operator(&OperatorExpr::power(pl.clone(), j), k, &env_base)?));
    }
    for j in 1..=4 {
        let expr = OperatorExpr::commutator(OperatorExpr::power(pl.clone(), j), dx.clone());
        fixed.push((format!("[P_L^{j},dx]"), dense_operator(&expr, k, &env_base)?));
    }

    let mut rows = Vec::new();
    let mut push = |operator: &str, sample: usize, got: &SpectralField, want: &SpectralField| {
        rows.push(OracleRow {
            operator: operator.to_owned(),
            sample,
            max_abs_diff: got.max_abs_diff(want),
            scale: want.max_abs(),
        });
    };
    for sample in 0..cfg.study.samples {
        let mut r = rng(cfg.seed, sample as u64);
        let u = gaussian_profile(k, 1.0, &mut r);
        let f = real_profile(k, 2.0, &mut r);
        let mut env = env_base.clone();
        env.insert("f", f.clone());

        let spectral: Vec<SpectralField> = {
            let mut out = vec![dispersion(&u, alpha), damper.multiply(&u, params.dealias)];
            for j in 1..=4 {
                out.push(z_pl_power(&u, &damper, alpha, j, params.dealias));
            }
            for j in 1..=4 {
                out.push(commutator_pl_dx(&u, &damper, alpha, j));
            }
            out
        };
        for ((name, op), got) in fixed.iter().zip(&spectral) {
            push(name, sample, got, &op.apply(&u));
        }
        for j in 1..=4 {
            let expr = OperatorExpr::commutator(OperatorExpr::power(pl.clone(), j), f_op.clone());
            let want = dense_operator(&expr, k, &env)?.apply(&u);
            push(&format!("[P_L^{j},f]"), sample, &commutator_pl_f(&u, &f, &damper, alpha, j), &want);
        }
        let want = dense_operator(&OperatorExpr::commutator(l.clone(), f_op.clone()), k, &env)?.apply(&u);
        push("[L,f]", sample, &commutator_l_f(&u, &f, alpha), &want);
        // P_L once more through the un-powered helper
        push("P_L(apply)", sample, &apply_pl(&u, &damper, alpha, params.dealias), &fixed[2].1.apply(&u));
        let v = &u * Complex64::new(0.3, 0.0);
        push("rhs", sample, &rhs(&v, &params)?, &dense_rhs(&v, &params)?);
    }
    Ok(rows)
}

fn write_file(dir: &Path, name: &str, files: &mut Vec<String>, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    body(&mut w)?;
    w.flush()?;
    files.push(name.to_owned());
    Ok(())
}

fn write_trajectory(
    dir: &Path,
    stem: &str,
    files: &mut Vec<String>,
    rec: &TrajectoryRecord,
    params: &ModelParams,
    cfg: &RunConfig,
    defaulted: &[String],
) -> Result<()> {
    write_file(dir, &format!("{stem}.csv"), files, |w| rec.write_csv(w))?;
    let mut sidecar = serde_json::to_value(rec.sidecar(params, &cfg.stepper, cfg.k_max, cfg.seed))?;
    if let Value::Object(map) = &mut sidecar {
        map.insert("scheme".into(), json!(cfg.stepper.scheme.name()));
        map.insert("defaulted".into(), json!(defaulted));
    }
    write_file(dir, &format!("{stem}.json"), files, |w| {
        serde_json::to_writer_pretty(&mut *w, &sidecar)?;
        writeln!(w)?;
        Ok(())
    })
}

fn termination_status(t: &Termination) -> Option<String> {
    match t {
        Termination::Nonfinite { time } => Some(format!("numerical blow-up at t = {time}")),
        _ => None,
    }
}

/// Runs the configured experiment into `dir` and writes `summary.json`
/// there whatever happens.
pub fn run(parsed: &ParsedConfig, dir: &Path) -> Summary {
    let cfg = &parsed.config;
    let mut summary = Summary::new(cfg.experiment.name(), &parsed.defaulted);
    if let Err(e) = fs::create_dir_all(dir) {
        summary.fail_with(Status::UsageError, format!("cannot create {}: {e}", dir.display()));
        return summary;
    }
    match execute(parsed, dir, &mut summary) {
        Ok(()) => summary.settle(),
        Err(e) => summary.fail_with(error_status(&e), e.to_string()),
    }
    if let Err(e) = summary.write(dir) {
        summary.fail_with(Status::UsageError, format!("cannot write summary: {e}"));
    }
    summary
}

fn execute(parsed: &ParsedConfig, dir: &Path, summary: &mut Summary) -> Result<()> {
    let cfg = &parsed.config;
    let defaulted = &parsed.defaulted;
    let files = &mut summary.files;
    write_file(dir, "config.txt", files, |w| Ok(w.write_all(emit_config(cfg).as_bytes())?))?;
    write_file(dir, "run.json", files, |w| {
        serde_json::to_writer_pretty(&mut *w, &json!({ "config": cfg, "defaulted": defaulted }))?;
        writeln!(w)?;
        Ok(())
    })?;

    let mut blow_up = None;
    match cfg.experiment {
        Experiment::LinearDecay | Experiment::SobolevDecay => {
            let (params, rec) = linear_run(cfg)?;
            write_trajectory(dir, "trajectory", files, &rec, &params, cfg, defaulted)?;
            blow_up = termination_status(&rec.termination);
            let a = params.alpha;
            if cfg.experiment == Experiment::LinearDecay {
                summary
                    .verdicts
                    .push(Verdict::at_most("l2_monotone", max_increase(&rec.l2_norm), L2_SLACK));
                let residual = rec.relative_identity_residual();
                summary
                    .verdicts
                    .push(Verdict::at_most("dissipation_identity", residual, IDENTITY_TOLERANCE));
                summary.headline = Some(Headline {
                    name: "relative_identity_residual".into(),
                    value: residual,
                });
            } else {
                let track = |q| rec.tracked(q).unwrap_or(&[]);
                let s1 = max_increase(track(Tracked::Sobolev(a)));
                let s2 = max_increase(track(Tracked::Sobolev(2.0 * a)));
                summary.verdicts.push(Verdict::at_most("sobolev_k1_monotone", s1, SOBOLEV_SLACK));
                summary.verdicts.push(Verdict::at_most("sobolev_k2_monotone", s2, SOBOLEV_SLACK));
                let d = &mut summary.diagnostics;
                d.insert("pl_power_1_max_increase".into(), json!(max_increase(track(Tracked::PlPower(1)))));
                d.insert("pl_power_2_max_increase".into(), json!(max_increase(track(Tracked::PlPower(2)))));
                summary.headline = Some(Headline {
                    name: "sobolev_max_increase".into(),
                    value: s1.max(s2),
                });
                write_file(dir, "norms.csv", &mut summary.files, |w| {
                    writeln!(w, "t,sobolev_alpha,sobolev_2alpha,pl_power_1,pl_power_2")?;
                    for i in 0..rec.len() {
                        writeln!(
                            w,
                            "{:e},{:e},{:e},{:e},{:e}",
                            rec.times[i],
                            track(Tracked::Sobolev(a))[i],
                            track(Tracked::Sobolev(2.0 * a))[i],
                            track(Tracked::PlPower(1))[i],
                            track(Tracked::PlPower(2))[i]
                        )?;
                    }
                    Ok(())
                })?;
            }
        }
        Experiment::NonlinearL2 | Experiment::EnergyCap | Experiment::EnergyCapAlt | Experiment::EnergyGrav => {
            let energy = cfg.experiment != Experiment::NonlinearL2;
            let study = quotient_study(cfg, energy)?;
            for (eps, params, rec) in &study.records {
                write_trajectory(dir, &format!("trajectory_eps_{eps:?}"), files, rec, params, cfg, defaulted)?;
                blow_up = blow_up.or_else(|| termination_status(&rec.termination));
            }
            write_file(dir, "quotients.csv", files, |w| {
                writeln!(w, "eps,sup_quotient,sup_transport_quotient,sampling_error,energy_ratio_min,energy_ratio_max")?;
                for r in &study.rows {
                    let (lo, hi) = r.energy_ratio.unwrap_or((f64::NAN, f64::NAN));
                    writeln!(
                        w,
                        "{:?},{:e},{:e},{:e},{:e},{:e}",
                        r.eps, r.sup_quotient, r.sup_transport_quotient, r.sampling_error, lo, hi
                    )?;
                }
                Ok(())
            })?;
            let q_spread = spread(&study.constants());
            summary.verdicts.push(Verdict::at_most(
                "sampling_error",
                study.max_sampling_error(),
                SAMPLING_TOLERANCE,
            ));
            summary.verdicts.push(Verdict::below("quotient_spread", q_spread, QUOTIENT_SPREAD));
            summary.verdicts.push(Verdict::below(
                "transport_quotient_spread",
                spread(&study.transport_constants()),
                QUOTIENT_SPREAD,
            ));
            if energy {
                let band = Baselines::committed()?.energy_band(cfg.model.flavor)?;
                let excursion = study
                    .rows
                    .iter()
                    .filter_map(|r| r.energy_ratio)
                    .map(|(lo, hi)| band.excursion(lo).max(band.excursion(hi)))
                    .fold(f64::NEG_INFINITY, f64::max);
                summary
                    .verdicts
                    .push(Verdict::at_most("energy_equivalence_band", excursion, BASELINE_TOLERANCE));
                summary.diagnostics.insert("baseline_band".into(), json!(band));
            }
            summary.diagnostics.insert("rows".into(), json!(study.rows));
            summary.headline = Some(Headline {
                name: "quotient_spread".into(),
                value: q_spread,
            });
        }
        Experiment::LifespanSweep => {
            let study = lifespan_study(cfg)?;
            write_file(dir, "lifespan.csv", files, |w| {
                writeln!(w, "eps,time,cause,time_times_eps,steps")?;
                for r in &study.results {
                    let cause = serde_json::to_value(r.cause)?;
                    writeln!(w, "{:?},{:e},{},{:e},{}", r.eps, r.time, cause.as_str().unwrap_or(""), r.time_times_eps, r.steps)?;
                }
                Ok(())
            })?;
            if let Some(r) = study.results.iter().find(|r| r.cause == LifespanCause::BlowUp) {
                blow_up = Some(format!("numerical blow-up at t = {} for ε = {}", r.time, r.eps));
            }
            let censored = study.results.iter().filter(|r| r.cause != LifespanCause::Threshold).count();
            summary
                .verdicts
                .push(Verdict::at_most("censored_probes", censored as f64, 0.0));
            if let Some(slope) = study.slope {
                summary.verdicts.push(Verdict::at_most("lifespan_slope", slope, LIFESPAN_SLOPE));
                summary.slope = Some(slope);
                summary.headline = Some(Headline {
                    name: "slope".into(),
                    value: slope,
                });
            } else if let Some(r) = study.results.first() {
                summary.headline = Some(Headline {
                    name: "lifespan".into(),
                    value: r.time,
                });
            }
            summary.diagnostics.insert(
                "outlived_inverse_eps".into(),
                json!(study.results.iter().map(|r| r.time_times_eps > 1.0).collect::<Vec<_>>()),
            );
            summary.diagnostics.insert("results".into(), json!(study.results));
        }
        Experiment::CommutatorSuite => {
            let reports = commutator_study(cfg)?;
            let mut worst = 0.0f64;
            for (i, report) in reports.iter().enumerate() {
                let stem = format!("commutator_{i:02}_{}", report.lemma);
                write_file(dir, &format!("{stem}.json"), files, |w| report.write_json(w))?;
                write_file(dir, &format!("{stem}.csv"), files, |w| report.write_csv(w))?;
                let growth = report.rows.iter().filter_map(|r| r.growth).fold(0.0, f64::max) - 1.0;
                let p = report.params.unwrap_or(SuiteParams::new(0, 0.0, 0.0, 0.0));
                summary.verdicts.push(Verdict::at_most(
                    format!("growth_{}_k{}_alpha{:?}_s{:?}_r{:?}", report.lemma, p.k, p.alpha, p.s, p.r),
                    growth,
                    GROWTH_TOLERANCE,
                ));
                worst = worst.max(report.overall_max());
            }
            summary.headline = Some(Headline {
                name: "max_ratio".into(),
                value: worst,
            });
        }
        Experiment::BernsteinSuite => {
            let report = bernstein_study(cfg)?;
            write_file(dir, "bernstein.json", files, |w| report.write_json(w))?;
            write_file(dir, "bernstein.csv", files, |w| report.write_csv(w))?;
            let outside = report.bernstein.iter().filter(|r| !r.within).count();
            summary
                .verdicts
                .push(Verdict::at_most("bernstein_rows_outside", outside as f64, 0.0));
            summary.headline = Some(Headline {
                name: "max_ratio".into(),
                value: report.bernstein.iter().map(|r| r.max_ratio).fold(0.0, f64::max),
            });
        }
        Experiment::OracleCheck => {
            let rows = oracle_study(cfg)?;
            write_file(dir, "oracle.csv", files, |w| {
                writeln!(w, "operator,sample,max_abs_diff,scale,relative")?;
                for r in &rows {
                    writeln!(w, "{},{},{:e},{:e},{:e}", r.operator, r.sample, r.max_abs_diff, r.scale, r.relative())?;
                }
                Ok(())
            })?;
            let worst = rows.iter().map(OracleRow::relative).fold(0.0, f64::max);
            summary.verdicts.push(Verdict::at_most("oracle_relative_error", worst, ORACLE_TOLERANCE));
            summary.headline = Some(Headline {
                name: "oracle_relative_error".into(),
                value: worst,
            });
        }
    }
    if let Some(cause) = blow_up {
        summary.fail_with(Status::BlowUp, cause);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread_conventions() {
        assert_eq!(spread(&[-1.0, -2.0, 0.0]), 1.0);
        assert_eq!(spread(&[0.0, 1.0]), f64::INFINITY);
        assert!((spread(&[1.0, 1.5, 2.0]) - 2.0).abs() < 1e-15);
        assert_eq!(spread(&[-3.0, 0.5, 0.5]), f64::INFINITY);
    }

    #[test]
    fn max_increase_of_sequences() {
        assert_eq!(max_increase(&[3.0, 2.0, 2.5, 1.0]), 0.5);
        assert_eq!(max_increase(&[3.0, 2.0, 1.0]), -1.0);
        assert_eq!(max_increase(&[1.0]), 0.0);
    }

    #[test]
    fn verdict_relations() {
        assert!(Verdict::at_most("a", 1.0, 1.0).pass);
        assert!(!Verdict::below("a", 2.0, 2.0).pass);
        assert!(Verdict::below("a", 1.99, 2.0).pass);
    }

    #[test]
    fn status_codes() {
        for s in [Status::Pass, Status::Fail, Status::UsageError, Status::BlowUp] {
            assert_eq!(Status::from_exit_code(s.exit_code()), s);
        }
        assert_eq!(error_status(&Error::NonFinite("x")), Status::BlowUp);
        assert_eq!(error_status(&Error::param("x")), Status::UsageError);
    }
}
