use std::path::Path;
use std::process::{Command, Output};

fn qcorr(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files_with_prefix(dir: &Path, prefix: &str) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with(prefix))
        .collect();
    names.sort();
    names
}

#[test]
fn p14_is_a_qubit_box() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcorr(dir.path(), &["membership", "--box", "P1:4", "--set", "q2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["verdict"], "feasible");
    assert_eq!(json["best_parameters"]["kind"], "qubit");
}

#[test]
fn triangle_interior_is_not() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcorr(
        dir.path(),
        &[
            "membership",
            "--box",
            "0.334*P1+0.333*P3+0.333*P4",
            "--set",
            "q2",
        ],
    );
    assert_eq!(code(&o), 1, "{}", stdout(&o));
}

#[test]
fn ptb_is_nonlocal_with_chsh_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcorr(
        dir.path(),
        &["membership", "--box", "PTB", "--set", "local"],
    );
    assert_eq!(code(&o), 1);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let coefficients: Vec<f64> = json["witness"]["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(coefficients, vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, -1.0]);
    assert!((json["witness"]["bound"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(json["exact"], true);
}

#[test]
fn box_json_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"scenario":[2,2,2],"format":"correlator","data":[0,0,0,0,1,1,1,-1]}"#;
    std::fs::write(dir.path().join("pr.json"), spec).unwrap();
    // PR box: no-signalling, maximally nonlocal
    let o = qcorr(
        dir.path(),
        &["membership", "--box", "pr.json", "--set", "local"],
    );
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let o = qcorr(dir.path(), &["membership", "--box", "missing.json"]);
    assert!(code(&o) >= 3);
}

#[test]
fn parse_errors_point_at_the_column() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcorr(dir.path(), &["membership", "--box", "0.5*P1+0.5P3"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("line 1, column 11"), "{}", stderr(&o));

    let o = qcorr(dir.path(), &["membership", "--box", "0.5*P1+0.4*P3"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("sum"));
}

#[test]
fn usage_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["membership", "--box", "P1", "--set", "q7"][..],
        &["frobnicate"][..],
        &["bounds", "2", "two", "2"][..],
        &["bounds", "0", "2", "2"][..],
        &["verify", "--only", "no-such-claim"][..],
        &["scan", "--triangle", "P0,P1", "--set", "local"][..],
        &["membership", "--box", "P1", "--restarts", "0"][..],
    ] {
        let o = qcorr(dir.path(), args);
        assert_eq!(code(&o), 3, "{args:?}: {}", stderr(&o));
    }
    let o = qcorr(dir.path(), &["--help"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn bounds_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcorr(dir.path(), &["bounds", "2", "2", "2"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("F = (m(v-1)+1)^n - 1 = 8"));
    assert!(out.contains("lower bound                           = 4"));
    assert!(out.contains("<= 8"));
    assert!(out.contains("convex  = 16"));

    let out = stdout(&qcorr(dir.path(), &["bounds", "2", "3", "2"]));
    assert!(out.contains("lower bound                           = 7"));
    let out = stdout(&qcorr(dir.path(), &["bounds", "3", "2", "2"]));
    assert!(out.contains("lower bound                           = 14"));
    assert!(out.contains("= 16"));
}

#[test]
fn scan_writes_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let args = [
        "scan",
        "--triangle",
        "P0,P1,PTB",
        "--set",
        "local",
        "--slices",
        "5",
        "--out-dir",
        out.to_str().unwrap(),
    ];
    let o = qcorr(dir.path(), &args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("max abs_error"));
    let first = files_with_prefix(&out, "scan-");
    assert_eq!(first.len(), 1);
    let text = std::fs::read_to_string(out.join(&first[0])).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("slice,critical,analytic,abs_error,verdict")
    );
    assert_eq!(text.lines().count(), 6);

    // rerun overwrites; a different command gets its own file
    qcorr(dir.path(), &args);
    assert_eq!(files_with_prefix(&out, "scan-"), first);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    assert_eq!(code(&qcorr(dir.path(), &json_args)), 0);
    let files = files_with_prefix(&out, "scan-");
    assert_eq!(files.len(), 2);
    let json = files.iter().find(|f| f.ends_with(".json")).unwrap();
    let table: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join(json)).unwrap()).unwrap();
    assert_eq!(table["rows"].as_array().unwrap().len(), 5);
    assert_eq!(table["reference"], "linear");
}

#[test]
fn verify_single_claim() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcorr(
        dir.path(),
        &["verify", "--only", "formula-ns-dimension,axiom6-direct-sum"],
    );
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("2 passed, 0 failed"));
    let reports = files_with_prefix(dir.path(), "verify-");
    assert_eq!(reports.len(), 1);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join(&reports[0])).unwrap())
            .unwrap();
    assert_eq!(report["claims"].as_array().unwrap().len(), 2);
    assert_eq!(report["claims"][0]["status"], "pass");
}

#[test]
fn scarani_claim_is_report_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcorr(
        dir.path(),
        &["verify", "--only", "appC-scarani-discrepancy"],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("1 report-only"));
}

#[test]
fn seeds_and_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "membership",
        "--box",
        "P3:4",
        "--restarts",
        "8",
        "--seed",
        "7",
    ];
    let a = stdout(&qcorr(dir.path(), &args));
    let b = stdout(&qcorr(dir.path(), &args));
    assert_eq!(a, b);

    std::fs::write(dir.path().join("cfg.json"), r#"{"restarts": 8, "seed": 7}"#).unwrap();
    let c = stdout(&qcorr(
        dir.path(),
        &["membership", "--box", "P3:4", "--config", "cfg.json"],
    ));
    assert_eq!(a, c);

    std::fs::write(dir.path().join("bad.json"), r#"{"restart": 8}"#).unwrap();
    let o = qcorr(
        dir.path(),
        &["membership", "--box", "P3:4", "--config", "bad.json"],
    );
    assert_eq!(code(&o), 3);

    let o = qcorr(
        dir.path(),
        &[
            "membership",
            "--box",
            "P3:4",
            "--restarts",
            "8",
            "--threads",
            "1",
        ],
    );
    assert_eq!(code(&o), 0);
}

#[test]
fn exports() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcorr(dir.path(), &["export", "vertices", "2", "2", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("16 vertices"));

    let o = qcorr(dir.path(), &["export", "local", "--box", "P1:4"]);
    assert_eq!(code(&o), 0);
    let file = &files_with_prefix(dir.path(), "decomposition-")[0];
    let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
    assert_eq!(text.lines().count(), 5);

    let o = qcorr(dir.path(), &["export", "box", "--box", "0.5*P3+0.5*P4"]);
    assert_eq!(code(&o), 0);
    let file = &files_with_prefix(dir.path(), "box-")[0];
    let box_json = std::fs::read_to_string(dir.path().join(file)).unwrap();
    // the exported file resolves back to P3:4
    let o = qcorr(dir.path(), &["membership", "--box", file, "--set", "lhv:2"]);
    assert_eq!(code(&o), 0, "{box_json}");
}

#[test]
fn default_verify_run_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcorr(dir.path(), &["verify"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 failed, 0 inconclusive, 2 report-only"), "{}", stdout(&o));
}
