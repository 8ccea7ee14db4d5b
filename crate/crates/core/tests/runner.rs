use std::fs;

use gbspectra::verify::{run, ExperimentConfig, REPORT_HEADER};
use gbspectra::Error;

fn small_config(dir: &std::path::Path, extra: &str) -> ExperimentConfig {
    let text = format!(
        "p = 2\nn = 8, 16\nspaces = poly; hyp:1:nonnested\nchecks = mineig, eq10, toeplitz\nproperty_cases = 4\nout = {}\n{extra}",
        dir.display()
    );
    ExperimentConfig::parse(&text).unwrap()
}

#[test]
fn report_and_summary_agree() {
    let dir = tempfile::tempdir().unwrap();
    let outcome = run(&small_config(dir.path(), "")).unwrap();
    assert!(
        outcome.passed(),
        "{:?}",
        outcome.rows.iter().filter(|r| !r.pass).collect::<Vec<_>>()
    );

    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some(REPORT_HEADER));
    assert_eq!(lines.count(), outcome.summary.total);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(
        summary["total"].as_u64().unwrap() as usize,
        outcome.rows.len()
    );
    assert_eq!(summary["failed"], 0);
    assert_eq!(summary["seed"], 0x5EED);
    let toeplitz_rows = outcome
        .rows
        .iter()
        .filter(|r| r.family() == "toeplitz")
        .count();
    assert_eq!(
        summary["checks"]["toeplitz"]["total"].as_u64().unwrap() as usize,
        toeplitz_rows
    );

    assert!(dir.path().join("symbols").read_dir().unwrap().count() > 0);
    assert!(dir.path().join("eigenvalues").read_dir().unwrap().count() > 0);
}

#[test]
fn report_is_byte_identical_across_runs_and_job_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(&small_config(a.path(), "")).unwrap();
    run(&small_config(b.path(), "jobs = 1")).unwrap();
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("report.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn trigonometric_phase_is_refused_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path(), "");
    cfg.set("spaces", "trig:12.566370614359172:nonnested")
        .unwrap();
    cfg.set("n", "2").unwrap();
    match run(&cfg) {
        Err(Error::PhaseConstraint { min_n, .. }) => assert_eq!(min_n, 5),
        other => panic!("expected phase refusal, got {other:?}"),
    }
    assert!(!dir.path().join("report.csv").exists());
}

#[test]
fn config_rejects_unknown_keys_and_negative_reaction() {
    assert!(ExperimentConfig::parse("colour = blue").is_err());
    let cfg = ExperimentConfig::parse("gamma = -1").unwrap();
    assert!(cfg.validate().is_err());
}

#[test]
fn shipped_default_config_matches_built_in_defaults() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.cfg");
    assert_eq!(
        ExperimentConfig::from_file(&path).unwrap(),
        ExperimentConfig::default()
    );
}
