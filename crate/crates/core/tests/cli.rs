use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn dampwave(out: &Path, args: &[&str]) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_dampwave"))
        .arg("run")
        .args(args.iter().flat_map(|a| ["--set", a]))
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
        .status;
    status.code().expect("exit code")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn oracle_check_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let args = ["experiment=oracle-check", "samples=5", "seed=11"];
    assert_eq!(dampwave(&a, &args), 0);
    assert_eq!(dampwave(&b, &args), 0);
    for file in ["oracle.csv", "summary.json"] {
        let x = std::fs::read(a.join(file)).unwrap();
        let y = std::fs::read(b.join(file)).unwrap();
        assert_eq!(x, y, "{file} differs between identical runs");
    }
}

#[test]
fn linear_decay_defaults_pass() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(dampwave(tmp.path(), &["experiment=linear-decay", "k_max=32"]), 0);
    let s = summary(tmp.path());
    assert_eq!(s["status"], "pass");
    let defaulted: Vec<&str> = s["defaulted"].as_array().unwrap().iter().filter_map(Value::as_str).collect();
    assert!(defaulted.contains(&"eps") && !defaulted.contains(&"k_max"));
    for f in ["trajectory.csv", "trajectory.json", "config.txt", "run.json"] {
        assert!(tmp.path().join(f).exists(), "{f} missing");
    }
}

#[test]
fn inadmissible_suite_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let code = dampwave(tmp.path(), &["experiment=commutator-suite", "lemma=L3.2", "r=1", "ensemble=2"]);
    assert_eq!(code, 2);
    let s = summary(tmp.path());
    assert_eq!(s["status"], "usage_error");
    assert!(s["cause"].as_str().unwrap().contains("r > 3/2"));
}

#[test]
fn unknown_key_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(dampwave(tmp.path(), &["no_such_key=1"]), 2);
    assert_eq!(summary(tmp.path())["status"], "usage_error");
}

#[test]
fn failed_verdict_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let code = dampwave(tmp.path(), &["experiment=sobolev-decay", "k_max=128"]);
    assert_eq!(code, 1);
    let s = summary(tmp.path());
    let failed: Vec<&str> = s["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["pass"] == false)
        .map(|v| v["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["sobolev_k2_monotone"]);
}

#[test]
fn numerical_blow_up_exits_three() {
    // RK4 transport far outside its stability region: h·K·|W| ≫ 3.
    let tmp = tempfile::tempdir().unwrap();
    let code = dampwave(
        tmp.path(),
        &[
            "experiment=lifespan-sweep",
            "safety=1",
            "dt=1",
            "k_max=128",
            "generator=random",
            "eps_values=0.2",
            "t_max=1000",
            "theta=1e300",
        ],
    );
    assert_eq!(code, 3);
    assert_eq!(summary(tmp.path())["status"], "blow_up");
}

#[test]
fn sweep_over_seeds() {
    let tmp = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_dampwave"))
        .args(["sweep", "--set", "experiment=oracle-check", "--set", "samples=2"])
        .args(["--set", "param=seed", "--set", "values=1,2,3", "--out"])
        .arg(tmp.path())
        .env("DAMPWAVE_THREADS", "2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let s = summary(tmp.path());
    let seeds: Vec<u64> = s["members"].as_array().unwrap().iter().map(|m| m["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, [1, 2, 3]);
    let csv = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    for i in 0..3 {
        assert!(tmp.path().join(format!("member_{i:03}/oracle.csv")).exists());
    }
}

#[test]
fn defaults_command_emits_parseable_config() {
    let out = Command::new(env!("CARGO_BIN_EXE_dampwave"))
        .args(["defaults", "energy-grav"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed = dampwave::harness::parse_config(&text).unwrap();
    assert_eq!(parsed.config, dampwave::harness::RunConfig::defaults(dampwave::harness::Experiment::EnergyGrav));
}
