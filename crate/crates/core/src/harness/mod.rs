//! Configuration-driven experiments, sweeps and committed baselines.

pub mod baselines;
pub mod config;
pub mod experiments;
pub mod sweep;

pub use config::{emit_config, parse_config, parse_with_overrides, Experiment, ParsedConfig, RunConfig, KEYS};
pub use experiments::{run, Status, Summary, Verdict};
pub use sweep::{run_sweep, SweepSummary};
