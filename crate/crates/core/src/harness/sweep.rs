//! One experiment repeated over the values of a single key.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Experiment, ParsedConfig, RunConfig};
use super::experiments::{run, Status, Summary};
use crate::error::{Error, Result};
use crate::integrator::loglog_slope;

/// Environment variable bounding the sweep's worker threads.
pub const THREADS_VAR: &str = "DAMPWAVE_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMember {
    pub index: usize,
    pub value: String,
    pub seed: u64,
    pub dir: PathBuf,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub experiment: String,
    pub param: String,
    pub status: Status,
    pub exit_code: i32,
    pub members: Vec<SweepMember>,
    /// `log T_ε` against `log ε` over the members, for a lifespan sweep of ε.
    pub slope: Option<f64>,
}

/// Member configurations. Sweeping `seed` sets it; otherwise member `i`
/// runs with `seed ^ i` so members draw independent data. Sweeping `eps`
/// also collapses `eps_values` to that single value.
pub fn members(parsed: &ParsedConfig) -> Result<Vec<(String, ParsedConfig)>> {
    let cfg = &parsed.config;
    let param = cfg.sweep.param.as_str();
    if param.is_empty() {
        return Err(Error::config("param", "no sweep parameter given"));
    }
    if cfg.sweep.values.is_empty() {
        return Err(Error::config("values", "no sweep values given"));
    }
    if matches!(param, "experiment" | "param" | "values" | "out_dir") {
        return Err(Error::config("param", format!("{param:?} cannot be swept")));
    }
    cfg.sweep
        .values
        .iter()
        .enumerate()
        .map(|(i, value)| {
            let mut member: RunConfig = cfg.clone();
            member.set(param, value)?;
            if param != "seed" {
                member.seed = cfg.seed ^ i as u64;
            }
            if param == "eps" {
                member.study.eps_values = vec![member.model.eps];
            }
            member.validate()?;
            let defaulted = parsed.defaulted.iter().filter(|k| k.as_str() != param).cloned().collect();
            Ok((
                value.clone(),
                ParsedConfig {
                    config: member,
                    defaulted,
                },
            ))
        })
        .collect()
}

fn pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_VAR) {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|_| Error::config(THREADS_VAR, format!("expected a thread count, got {raw:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::config(THREADS_VAR, e.to_string()))
}

/// Runs every member into `dir/member_<i>` and writes `sweep.csv` and
/// `summary.json` into `dir`.
pub fn run_sweep(parsed: &ParsedConfig, dir: &Path) -> Result<SweepSummary> {
    let members = members(parsed)?;
    fs::create_dir_all(dir)?;
    let results: Vec<SweepMember> = pool()?.install(|| {
        members
            .par_iter()
            .enumerate()
            .map(|(index, (value, member))| {
                let sub = dir.join(format!("member_{index:03}"));
                let summary = run(member, &sub);
                SweepMember {
                    index,
                    value: value.clone(),
                    seed: member.config.seed,
                    dir: PathBuf::from(format!("member_{index:03}")),
                    summary,
                }
            })
            .collect()
    });

    let cfg = &parsed.config;
    let slope = if cfg.experiment == Experiment::LifespanSweep && cfg.sweep.param == "eps" && results.len() >= 2 {
        let eps: Vec<f64> = members.iter().map(|(_, m)| m.config.model.eps).collect();
        let times: Option<Vec<f64>> = results
            .iter()
            .map(|m| m.summary.diagnostics.get("results")?.get(0)?.get("time")?.as_f64())
            .collect();
        times.and_then(|t| loglog_slope(&eps, &t).ok())
    } else {
        None
    };
    let exit_code = results.iter().map(|m| m.summary.exit_code).max().unwrap_or(0);
    let summary = SweepSummary {
        experiment: cfg.experiment.name().to_owned(),
        param: cfg.sweep.param.clone(),
        status: Status::from_exit_code(exit_code),
        exit_code,
        members: results,
        slope,
    };

    let mut w = BufWriter::new(File::create(dir.join("sweep.csv"))?);
    writeln!(w, "index,value,seed,status,exit_code,headline,headline_value")?;
    for m in &summary.members {
        let (name, value) = m
            .summary
            .headline
            .as_ref()
            .map_or((String::new(), f64::NAN), |h| (h.name.clone(), h.value));
        let status = serde_json::to_value(m.summary.status)?;
        writeln!(
            w,
            "{},{},{},{},{},{},{:e}",
            m.index,
            m.value,
            m.seed,
            status.as_str().unwrap_or(""),
            m.summary.exit_code,
            name,
            value
        )?;
    }
    w.flush()?;
    let mut w = BufWriter::new(File::create(dir.join("summary.json"))?);
    serde_json::to_writer_pretty(&mut w, &summary)?;
    writeln!(w)?;
    Ok(summary)
}
