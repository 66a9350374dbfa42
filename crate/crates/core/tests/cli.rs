//! The command-line front end: exit codes and report files.

use std::path::{Path, PathBuf};

use serde_json::Value;
use starflow::cli::main_with;

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str], out: &Path) -> i32 {
    let mut argv = vec!["starflow"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--out", out.to_str().unwrap()]);
    main_with(argv)
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

#[test]
fn axioms_report_and_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let sys = config("inclusion_set.json");
    let win = config("wide_box.json");
    assert_eq!(run(&["axioms", "--system", &sys, "--window", &win], dir.path()), 0);
    let report = read_json(dir.path().join("axioms.json"));
    let text = report.to_string();
    assert!(text.contains("refuted"), "{text}");
    assert!(dir.path().join("metadata.json").exists());
    let witnesses: Vec<_> = std::fs::read_dir(dir.path().join("witnesses")).unwrap().collect();
    assert!(!witnesses.is_empty());
}

#[test]
fn equiv_exit_codes_follow_requested_level() {
    let dir = tempfile::tempdir().unwrap();
    let (fwd, back, win) = (config("unit_drift.json"), config("reverse_drift.json"), config("box.json"));
    let base = ["equiv", "--system", &fwd, "--system", &back, "--window", &win, "--builder", "time-reversal"];
    let mut iso = base.to_vec();
    iso.extend_from_slice(&["--level", "isomorphism"]);
    assert_eq!(run(&iso, dir.path()), 0);
    let mut eq = base.to_vec();
    eq.extend_from_slice(&["--level", "equivalent"]);
    assert_eq!(run(&eq, dir.path()), 1);
    let report = read_json(dir.path().join("equivalence.json"));
    assert!(report.to_string().contains("monotone"), "{report}");
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["axioms", "--system", "/nonexistent.json"], dir.path()), 2);
    let sys = config("riccati_a1.json");
    assert_eq!(run(&["equiv", "--system", &sys, "--builder", "bogus"], dir.path()), 2);
    assert_eq!(run(&["examples", "--only", "ex9"], dir.path()), 2);
    assert_eq!(run(&["frobnicate"], dir.path()), 2);
}

#[test]
fn converge_on_adversarial_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let sys = config("inclusion_set.json");
    let win = config("wide_box.json");
    assert_eq!(run(&["converge", "--system", &sys, "--window", &win], dir.path()), 0);
    assert!(dir.path().join("convergence.json").exists());
}

#[test]
fn examples_subset_matches_table() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["examples", "--only", "ex4"], dir.path()), 0);
    let report = read_json(dir.path().join("examples.json"));
    assert_eq!(report["all_match"], Value::Bool(true));
    assert!(report["rows"].as_array().is_some_and(|r| !r.is_empty()));
}
