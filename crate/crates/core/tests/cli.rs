//! End-to-end runs of the `rik` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rik(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rik"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn major_exit_code_follows_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.json",
        r#"{"alpha":"1","breakpoints":[0,1],"values":[1]}"#,
    );
    let g = write(
        dir.path(),
        "g.json",
        r#"{"alpha":"1","breakpoints":[0,0.5],"values":[2]}"#,
    );
    let out = rik(&["major", &f, &g], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["holds"], true);
    assert_eq!(rik(&["major", &g, &f], dir.path()).status.code(), Some(1));
}

#[test]
fn norm_prints_the_value() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", r#"{"variant":"L1+LInf"}"#);
    let x = write(
        dir.path(),
        "x.json",
        r#"{"alpha":"inf","breakpoints":[0,1,2],"values":[3,1]}"#,
    );
    let out = rik(&["norm", &spec, &x], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["norm"], 3.0);
}

#[test]
fn check_certifies_an_operator_file() {
    let dir = tempfile::tempdir().unwrap();
    let op = write(
        dir.path(),
        "op.json",
        r#"{"node":"circulant_kernel","weights":[0.5,0.5],"grid":{"width":0.125,"cells":8}}"#,
    );
    let out = rik(&["check", &op, "--probes", "10"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["passed"], true);
    assert_eq!(cert["probes"], 11);
}

#[test]
fn scenario_writes_deterministic_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "cfg.json",
        r#"{"scenario":"dukm-reconstruction","sizes":{"grid":2,"reconstruct":3},
            "operator":{"node":"partition_average","family":{"cells":[[0,1]]},"keep_residual":true},
            "function":{"alpha":"1","breakpoints":[0,0.5],"values":[2]}}"#,
    );
    let mut bodies = Vec::new();
    for run in ["a", "b"] {
        let out = rik(
            &[
                "dukm-reconstruction",
                "--config",
                &config,
                "--out",
                run,
                "--seed",
                "3",
            ],
            dir.path(),
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stdout).contains("PASS b0_reconstruction"));
        let csv = fs::read_to_string(dir.path().join(run).join("dukm-reconstruction.csv")).unwrap();
        let json =
            fs::read_to_string(dir.path().join(run).join("dukm-reconstruction.json")).unwrap();
        bodies.push((csv, json));
    }
    assert_eq!(bodies[0], bodies[1]);
    let report: serde_json::Value = serde_json::from_str(&bodies[0].1).unwrap();
    assert_eq!(report["provenance"]["config"]["seed"], 3);
    assert_eq!(
        report["summary"]["b0"]["matrix"]["rows"],
        serde_json::json!([[0.5, 0.5], [0.5, 0.5]])
    );
}

#[test]
fn csv_only_output_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = rik(
        &["power-iteration", "--format", "csv", "--out", "o"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("o/power-iteration.csv").exists());
    assert!(!dir.path().join("o/power-iteration.json").exists());

    assert_eq!(
        rik(&["no-such-scenario"], dir.path()).status.code(),
        Some(2)
    );
    let config = write(dir.path(), "big.json", r#"{"sizes":{"levels":21}}"#);
    let out = rik(&["sn-convergence", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}
