use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn logsob(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logsob"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("LOGSOB_OUT_DIR")
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn value(report: &Value, label: &str) -> f64 {
    report["result"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["label"] == label)
        .unwrap_or_else(|| panic!("no value {label}"))["value"]
        .as_f64()
        .unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("stderr: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn seminorm_of_zero_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = logsob(&["seminorm", "-f", "constant:0"], dir.path());
    assert!(out.status.success());
    let rep = json(&dir.path().join("seminorm.json"));
    assert_eq!(rep["schema_version"], 1);
    assert_eq!(value(&rep, "seminorm[0]"), 0.0);
    assert_eq!(rep["config"]["subcommand"], "seminorm");
    assert_eq!(rep["config"]["functions"][0]["kind"], "constant");
}

#[test]
fn indicator_scaling_defaults_write_fit_and_four_point_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = logsob(&["experiment", "indicator-scaling", "--no-refine"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json(&dir.path().join("experiment-indicator-scaling.json"));
    assert!(value(&rep, "a").is_finite());
    assert!(value(&rep, "b").is_finite());
    assert_eq!(rep["config"]["domain"]["n"], 4096);
    let csv = fs::read_to_string(dir.path().join("experiment-indicator-scaling.scaling.csv")).unwrap();
    let lines: Vec<&str> = csv.split("\r\n").filter(|l| !l.is_empty()).collect();
    assert_eq!(lines.len(), 1 + 4, "{csv}");
    assert!(csv.ends_with("\r\n"));
}

#[test]
fn invalid_gamma_names_the_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let out = logsob(&["seminorm", "--gamma", "-1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"]["code"], "invalid_parameter");
    assert_eq!(err["error"]["parameter"], "gamma");
    assert!(!dir.path().join("seminorm.json").exists());
}

#[test]
fn unknown_subcommands_are_usage_or_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = logsob(&["teleport"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["code"], "usage");

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "subcommand = \"teleport\"\n").unwrap();
    let out = logsob(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["code"], "invalid_config");
}

#[test]
fn unwritable_output_dir_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = logsob(&["seminorm", "-n", "64"], &blocker.join("sub"));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["code"], "io");
}

#[test]
fn report_replays_to_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = logsob(&["lusin", "-n", "512", "--pairs", "500", "--seed", "9"], dir.path());
    assert!(out.status.success());
    let first = fs::read(dir.path().join("lusin.json")).unwrap();
    let report = dir.path().join("saved.json");
    fs::write(&report, &first).unwrap();
    let again = tempfile::tempdir().unwrap();
    let out = logsob(&["run", report.to_str().unwrap()], again.path());
    assert!(out.status.success());
    assert_eq!(fs::read(again.path().join("lusin.json")).unwrap(), first);
}

#[test]
fn printed_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = logsob(&["experiment", "local-diff", "--smooth", "abs", "--print-config"], dir.path());
    assert!(out.status.success());
    let toml = String::from_utf8(out.stdout).unwrap();
    assert!(toml.contains("experiment = \"local-diff\""), "{toml}");
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, &toml).unwrap();
    let out = logsob(&["run", cfg.to_str().unwrap(), "--print-config"], dir.path());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), toml);
}

#[test]
fn env_var_sets_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_logsob"))
        .args(["kernel-moment", "--xi", "0.5,50"])
        .env("LOGSOB_OUT_DIR", dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let rep = json(&dir.path().join("kernel-moment.json"));
    assert!(value(&rep, "I(50)") > value(&rep, "I(0.5)"));
}

#[test]
fn svg_embeds_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = logsob(&["phistar", "-n", "128", "--svg"], dir.path());
    assert!(out.status.success());
    let svg = fs::read_to_string(dir.path().join("phistar.profile.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<metadata>") && svg.contains("phistar"));
}

#[test]
fn coarse_verify_all_skips_and_repeats_byte_identically() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = logsob(&["verify-all", "-n", "64", "--seed", "3"], d.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    }
    let first = fs::read(a.path().join("verify-all.json")).unwrap();
    assert_eq!(first, fs::read(b.path().join("verify-all.json")).unwrap());
    let rep: Value = serde_json::from_slice(&first).unwrap();
    let statuses: Vec<&str> = rep["result"]["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["status"].as_str().unwrap())
        .collect();
    assert!(statuses.contains(&"skipped_too_coarse"));
    assert!(!statuses.contains(&"fail"));
}
