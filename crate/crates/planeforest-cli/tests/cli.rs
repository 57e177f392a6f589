//! End-to-end checks of the command-line interface.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_planeforest"))
}

fn write(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn sample_emits_json_lines_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    // {0:6, 2:3, 3:1}: n = 10, c = 6 - 3 - 2 = 1, so one tree per forest
    let degrees = write(dir.path(), "degrees.json", r#"{"counts":{"0":6,"2":3,"3":1}}"#);

    let run = |seed: &str| {
        let out = bin()
            .args(["sample", "--degrees"])
            .arg(&degrees)
            .args(["--seed", seed, "--count", "4"])
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let first = run("7");
    let again = run("7");
    let other = run("8");
    assert_eq!(first, again);
    assert_ne!(first, other);

    let mut lines = 0;
    for line in first.lines() {
        let forest: serde_json::Value = serde_json::from_str(line).unwrap();
        let trees = forest["trees"].as_array().unwrap();
        assert_eq!(trees.len(), 1);
        let vertices: usize = trees.iter().map(|t| t.as_array().unwrap().len()).sum();
        assert_eq!(vertices, 10);
        lines += 1;
    }
    assert_eq!(lines, 4);
}

#[test]
fn enumerate_reports_exact_counts() {
    let dir = tempfile::tempdir().unwrap();
    let degrees = write(dir.path(), "degrees.json", r#"{"counts":{"0":3,"1":2,"3":1}}"#);
    let out = bin()
        .args(["enumerate", "--degrees"])
        .arg(&degrees)
        .args(["--first-passage"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 10);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("expected_first_passage=10"), "stderr: {stderr}");
    assert!(stderr.contains("expected_bridges=60"));
}

#[test]
fn enumerate_rejects_invalid_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let degrees = write(dir.path(), "bad.json", r#"{"counts":{"1":5}}"#);
    let out = bin()
        .args(["enumerate", "--degrees"])
        .arg(&degrees)
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn verify_suites_pass_at_small_caps() {
    let out = bin()
        .args(["verify", "--max-n", "6", "--max-degree", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    for suite in ["counting_formulas", "rotation_n_to_one", "marked_maps", "codec_round_trip"] {
        assert!(stdout.contains(&format!("{suite}: PASS")), "stdout: {stdout}");
    }
}

#[test]
fn experiment_writes_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "config.json",
        r#"{
            "degree_family": {"kind": "binary"},
            "n_list": [400],
            "lambda_target": 1.0,
            "replicates": 50,
            "grid_m": 256,
            "seed": 5,
            "ks_margin": 0.08,
            "sum_check_m": 65536,
            "sum_check_replicates": 10
        }"#,
    );
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["experiment", "tree_sizes", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "stdout: {stdout}");
    assert!(stdout.contains("PASS"));

    let report_path = out_dir.join("tree_sizes").join("report.json");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["name"], "tree_sizes");
    assert!(report["verdicts"].as_array().unwrap().len() >= 4);
    // one CSV file per table
    for (name, _) in report["tables"].as_object().unwrap() {
        assert!(out_dir.join("tree_sizes").join(format!("{name}.csv")).exists());
    }
}

#[test]
fn experiment_rejects_unknown_name() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "config.json",
        r#"{"degree_family":{"kind":"binary"},"n_list":[100],"replicates":5,"seed":1}"#,
    );
    let out = bin()
        .args(["experiment", "nonsense", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(!out.status.success());
}
