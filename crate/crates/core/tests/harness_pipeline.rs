use clusterdet::harness::*;
use clusterdet::Error;

/// Scenario-1 preset shrunk to a 16×16 array and a handful of trials.
fn small(preset: &str, trials: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::preset(preset).unwrap();
    cfg.geometry.upa_rows = 16;
    cfg.geometry.upa_cols = 16;
    cfg.budget.array_elements = 256;
    cfg.detection.max_iters = 30;
    cfg.detection.snr_sweep_db = vec![10.0, 16.0];
    cfg.monte_carlo.trials = trials;
    cfg
}

fn with_threads_cfg(cfg: &ScenarioConfig, threads: usize) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.monte_carlo.threads = Some(threads);
    c
}

#[test]
fn payloads_do_not_depend_on_worker_count() {
    let cfg = small("scenario1", 24);
    for study in Study::ALL {
        let a = run_study(&with_threads_cfg(&cfg, 1), study).unwrap();
        let b = run_study(&with_threads_cfg(&cfg, 4), study).unwrap();
        assert_eq!(a.numeric_payload(), b.numeric_payload(), "{study}");
        assert_eq!(a.failed_trials, b.failed_trials);
    }
}

#[test]
fn reruns_from_the_config_echo_are_identical() {
    let cfg = small("scenario1", 12);
    for study in Study::ALL {
        let first = run_study(&cfg, study).unwrap();
        let text = to_json(&first).unwrap();
        let parsed = from_json(&text).unwrap();
        assert_eq!(parsed, first);
        let again = run_study(&parsed.config, study).unwrap();
        assert_eq!(again.numeric_payload(), first.numeric_payload());
        // The echoed config also survives TOML.
        let toml = parsed.config.to_toml_string().unwrap();
        assert_eq!(ScenarioConfig::from_toml_str(&toml).unwrap(), cfg);
    }
}

#[test]
fn emitted_files_have_documented_layout() {
    let cfg = small("scenario1", 6);
    let dir = tempfile::tempdir().unwrap();
    let expected = [
        (Study::Study1, "heatmap.csv", "row,col,db"),
        (Study::Study2, "cdf.csv", "value,probability,matrix"),
        (
            Study::Study3,
            "ser_vs_iteration.csv",
            "iteration,ser,stderr,method",
        ),
        (Study::Study4, "ser_vs_snr.csv", "snr_db,ser,stderr,method"),
    ];
    for (study, file, header) in expected {
        let out = dir.path().join(study.name());
        let result = run_study(&cfg, study).unwrap();
        let written = emit(&result, &[OutputFormat::Json, OutputFormat::Csv], &out).unwrap();
        assert_eq!(written, vec![out.join(RESULT_FILE), out.join(file)]);
        let csv = std::fs::read_to_string(out.join(file)).unwrap();
        assert_eq!(csv.lines().next(), Some(header));
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));
        let back = read_result(&out.join(RESULT_FILE)).unwrap();
        assert_eq!(back, result);
        assert_eq!(back.schema_version, SCHEMA_VERSION);
    }
}

#[test]
fn emit_reports_the_failing_path() {
    let cfg = small("scenario1", 2);
    let result = run_study(&cfg, Study::Study1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let err = emit(&result, &[OutputFormat::Json], &blocker.join("sub")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("file"));
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn single_cluster_heatmap_has_no_gap() {
    let mut cfg = small("scenario1", 1);
    cfg.layout.clusters = 1;
    cfg.layout.users_per_cluster = 6;
    let result = run_study(&cfg, Study::Study1).unwrap();
    let Payload::Heatmap(p) = &result.payload else {
        panic!()
    };
    assert_eq!(p.heatmap.dim, 6);
    assert_eq!(p.gap_db, None);
    assert_eq!(p.summary.inter_db, None);
    assert!(p.summary.intra_db.is_some());
}

#[test]
fn scenario_heatmap_separates_clusters() {
    let result = run_study(&small("scenario1", 1), Study::Study1).unwrap();
    let Payload::Heatmap(p) = &result.payload else {
        panic!()
    };
    assert_eq!(p.heatmap.dim, 16);
    for i in 0..16 {
        assert!(p.heatmap.get(i, i) >= -3.0);
        for j in 0..16 {
            assert_eq!(p.heatmap.get(i, j), p.heatmap.get(j, i));
        }
    }
    assert!(p.gap_db.unwrap() >= 10.0);
}

#[test]
fn single_cluster_detector_starts_at_lmmse() {
    let mut cfg = small("scenario1", 20);
    cfg.layout.clusters = 1;
    cfg.layout.users_per_cluster = 6;
    let result = run_study(&cfg, Study::Study3).unwrap();
    let lmmse = result.curve("lmmse").unwrap().ser[0];
    for method in ["ri", "gs", "ssor"] {
        let curve = result.curve(&format!("{method}_proposed")).unwrap();
        assert_eq!(curve.ser[0], lmmse);
        assert!(curve.ser.iter().all(|&s| s == lmmse));
    }
    let Payload::Convergence(p) = &result.payload else {
        panic!()
    };
    for it in p
        .iterations_to_lmmse
        .iter()
        .filter(|i| i.method.ends_with("proposed"))
    {
        assert_eq!(it.iterations, Some(0));
    }
}

#[test]
fn perfect_csi_sweep_reduces_to_fixed_snr_study() {
    let mut s4 = small("scenario1", 16);
    s4.detection.nmse_db = None;
    s4.detection.snr_sweep_db = vec![14.0];
    s4.detection.sweep_proposed_iters = vec![3];
    s4.detection.sweep_conventional_iters = vec![3];
    let mut s3 = s4.clone();
    s3.detection.snr_db = Some(14.0);
    s3.detection.methods = vec![clusterdet::detectors::Method::Gs];

    let r4 = run_study(&s4, Study::Study4).unwrap();
    let r3 = run_study(&s3, Study::Study3).unwrap();
    assert_eq!(
        r4.curve("lmmse").unwrap().ser[0],
        r3.curve("lmmse").unwrap().ser[0]
    );
    assert_eq!(
        r4.curve("gs_proposed_t3").unwrap().ser[0],
        r3.curve("gs_proposed").unwrap().ser[3]
    );
    assert_eq!(
        r4.curve("gs_conventional_t3").unwrap().ser[0],
        r3.curve("gs_conventional").unwrap().ser[3]
    );
}

#[test]
fn conditioning_payload_is_consistent() {
    let result = run_study(&small("scenario1", 30), Study::Study2).unwrap();
    let Payload::Conditioning(p) = &result.payload else {
        panic!()
    };
    assert_eq!(p.kappa_a.values.len(), 30);
    assert_eq!(p.kappa_a.median(), p.median_kappa_a);
    assert!(p.median_kappa_psi >= 1.0);
    assert!(p.median_kappa_a > p.median_kappa_psi);
    assert!(p.bound_holds == p.bound_informative);
    assert_eq!(result.trials, 30);
    assert!(result.ledger.block_invert > 0 && result.ledger.transform > 0);
}

#[test]
fn curves_carry_trial_counts_and_stderr() {
    let result = run_study(&small("scenario1", 10), Study::Study3).unwrap();
    let Payload::Convergence(p) = &result.payload else {
        panic!()
    };
    assert_eq!(p.curves.len(), 7);
    for c in &p.curves {
        assert_eq!(c.trials, 10);
        assert_eq!(c.symbols, 160);
        assert_eq!(c.len(), 31);
        assert_eq!(c.stderr.len(), c.len());
        assert!(c.ser.iter().all(|s| (0.0..=1.0).contains(s)));
    }
    assert_eq!(p.failures.len(), 6);
}

#[test]
fn single_trial_runs() {
    let result = run_study(&small("scenario2", 1), Study::Study4).unwrap();
    assert_eq!(result.trials, 1);
    assert_eq!(result.curve("lmmse").unwrap().trials, 1);
}

#[test]
fn invalid_configs_fail_before_running() {
    let mut cfg = small("scenario1", 0);
    assert!(matches!(
        run_study(&cfg, Study::Study2),
        Err(Error::Config(_))
    ));
    cfg.monte_carlo.trials = 1;
    cfg.detection.methods.clear();
    let err = run_study(&cfg, Study::Study3).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}
