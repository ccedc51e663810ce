use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dampwave::harness::config::parse_with_overrides;
use dampwave::harness::{emit_config, run, run_sweep, Experiment, RunConfig, Status, Summary, KEYS};

#[derive(Parser)]
#[command(name = "dampwave", version, about = "Damped dispersive wave experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run(RunArgs),
    /// Repeat an experiment over the values of `sweep.param`.
    Sweep(RunArgs),
    /// Print the full default configuration of an experiment.
    Defaults { experiment: Experiment },
    /// List every configuration key.
    Keys,
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (`[section]` headers and `key = value` lines).
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override a key, as `key=value` or `section.key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory; overrides `out_dir`.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn load(args: &RunArgs) -> Result<dampwave::harness::ParsedConfig, String> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => String::new(),
    };
    let mut overrides = Vec::new();
    for s in &args.set {
        let (k, v) = s.split_once('=').ok_or_else(|| format!("--set {s:?}: expected KEY=VALUE"))?;
        overrides.push((k.trim().to_owned(), v.trim().to_owned()));
    }
    if let Some(out) = &args.out {
        overrides.push(("out_dir".to_owned(), out.display().to_string()));
    }
    parse_with_overrides(&text, &overrides).map_err(|e| e.to_string())
}

fn report(summary: &Summary) {
    let status = serde_json::to_value(summary.status).map(|v| v.as_str().unwrap_or("").to_owned());
    let status = status.unwrap_or_default();
    match &summary.headline {
        Some(h) => println!("{}: {status} ({} = {:e})", summary.experiment, h.name, h.value),
        None => println!("{}: {status}", summary.experiment),
    }
    for v in &summary.verdicts {
        let rel = if v.strict { "<" } else { "<=" };
        let mark = if v.pass { "ok  " } else { "FAIL" };
        println!("  {mark} {} = {:e} {rel} {:e}", v.name, v.value, v.limit);
    }
    if let Some(c) = &summary.cause {
        eprintln!("{c}");
    }
}

fn usage_error(args: &RunArgs, message: String) -> ExitCode {
    eprintln!("error: {message}");
    let summary = Summary::usage_error("unknown", message);
    let dir = args.out.clone().unwrap_or_else(|| RunConfig::defaults(Experiment::LinearDecay).out_dir);
    if let Err(e) = summary.write(&dir) {
        eprintln!("cannot write summary: {e}");
    }
    ExitCode::from(Status::UsageError.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let parsed = match load(&args) {
                Ok(p) => p,
                Err(m) => return usage_error(&args, m),
            };
            let summary = run(&parsed, &parsed.config.out_dir);
            report(&summary);
            ExitCode::from(summary.exit_code as u8)
        }
        Command::Sweep(args) => {
            let parsed = match load(&args) {
                Ok(p) => p,
                Err(m) => return usage_error(&args, m),
            };
            match run_sweep(&parsed, &parsed.config.out_dir) {
                Ok(s) => {
                    for m in &s.members {
                        print!("[{} = {}] ", s.param, m.value);
                        report(&m.summary);
                    }
                    if let Some(slope) = s.slope {
                        println!("slope = {slope:.4}");
                    }
                    ExitCode::from(s.exit_code as u8)
                }
                Err(e) => usage_error(&args, e.to_string()),
            }
        }
        Command::Defaults { experiment } => {
            print!("{}", emit_config(&RunConfig::defaults(experiment)));
            ExitCode::SUCCESS
        }
        Command::Keys => {
            for (section, key, doc) in KEYS {
                println!("{section:8} {key:18} {doc}");
            }
            ExitCode::SUCCESS
        }
    }
}
