use std::path::Path;
use std::process::{Command, Output};

use clusterdet::harness::{read_result, ScenarioConfig, Study};

fn clusterdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clusterdet"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Small scenario file so runs finish quickly.
fn write_small_config(dir: &Path) -> String {
    let mut cfg = ScenarioConfig::preset("scenario1").unwrap();
    cfg.geometry.upa_rows = 8;
    cfg.geometry.upa_cols = 8;
    cfg.budget.array_elements = 64;
    cfg.detection.max_iters = 10;
    cfg.monte_carlo.trials = 5;
    let path = dir.join("small.toml");
    std::fs::write(&path, cfg.to_toml_string().unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn presets_are_listed_and_dumped() {
    let out = clusterdet(&["presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("scenario1") && text.contains("scenario2"));

    let out = clusterdet(&["presets", "--dump", "scenario2"]);
    assert!(out.status.success());
    let cfg = ScenarioConfig::from_toml_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg, ScenarioConfig::preset("scenario2").unwrap());
}

#[test]
fn validate_accepts_good_and_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_small_config(dir.path());
    assert!(clusterdet(&["validate", &good]).status.success());

    let bad = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(&good)
        .unwrap()
        .replace("carrier_hz", "carrier_ghz");
    std::fs::write(&bad, text).unwrap();
    let out = clusterdet(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("carrier_ghz"));

    let missing = dir.path().join("missing.toml");
    assert_eq!(
        clusterdet(&["validate", missing.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn run_writes_results_with_overrides_applied() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small_config(dir.path());
    let out_dir = dir.path().join("out");
    let out = clusterdet(&[
        "run",
        "study3",
        "--config",
        &cfg,
        "--seed",
        "7",
        "--trials",
        "3",
        "--threads",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let result = read_result(&out_dir.join("result.json")).unwrap();
    assert_eq!(result.study, Study::Study3);
    assert_eq!(result.trials, 3);
    assert_eq!(result.config.monte_carlo.seed, 7);
    assert_eq!(result.config.monte_carlo.threads, Some(2));
    assert!(out_dir.join("ser_vs_iteration.csv").exists());
}

#[test]
fn format_flag_selects_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small_config(dir.path());
    let out_dir = dir.path().join("csv_only");
    let out = clusterdet(&[
        "run",
        "study2",
        "--config",
        &cfg,
        "--format",
        "csv",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out_dir.join("cdf.csv").exists());
    assert!(!out_dir.join("result.json").exists());
}

#[test]
fn bad_arguments_exit_with_config_code() {
    assert_eq!(clusterdet(&["run", "study9"]).status.code(), Some(2));
    assert_eq!(
        clusterdet(&["run", "study1", "--preset", "nowhere"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        clusterdet(&["run", "study1", "--trials", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        clusterdet(&["run", "study1", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small_config(dir.path());
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "").unwrap();
    let target = blocker.join("out");
    let out = clusterdet(&[
        "run",
        "study1",
        "--config",
        &cfg,
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}
