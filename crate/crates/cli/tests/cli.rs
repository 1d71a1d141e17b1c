use std::fs;
use std::process::{Command, Output};

fn gcflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcflow"))
        .args(args)
        .env_remove("GCFLOW_TOL_PROFILE")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

#[test]
fn verify_writes_identical_reports_for_identical_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = gcflow(&[
            "verify",
            "--fixture",
            "HOPF",
            "--samples",
            "40",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(a).unwrap();
    assert_eq!(a, fs::read(b).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["provenance"]["seed"], 9);
    assert_eq!(report["pass"], true);
}

#[test]
fn classify_reports_the_map_verdict() {
    let out = gcflow(&["classify", "--fixture", "conf05", "--samples", "40"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["targets"][0]["field_class"], "conformal");
}

#[test]
fn classify_accepts_a_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("shifted.json");
    fs::write(
        &spec,
        r#"{"kind": "chart-polynomial", "coefficients": [[0, 0, 0.2, 0.0], [1, 0, 0.4, 0.0]], "domain_radius": 1.0}"#,
    )
    .unwrap();
    let out = gcflow(&["classify", "--spec", spec.to_str().unwrap(), "--samples", "40"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["targets"][0]["name"], "shifted");
    assert_eq!(report["targets"][0]["field_class"], "volume-preserving");
}

#[test]
fn failing_check_exits_one() {
    let out = gcflow(&[
        "verify",
        "--fixture",
        "HOPF",
        "--suite",
        "prop-1",
        "--samples",
        "20",
        "--tol-contact-min",
        "5",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL contact-det"));
}

#[test]
fn configuration_errors_exit_two() {
    assert_eq!(code(&gcflow(&["verify", "--suite", "nonsense"])), 2);
    assert_eq!(code(&gcflow(&["verify", "--fixture", "NOPE"])), 2);
    assert_eq!(code(&gcflow(&["verify", "--samples", "0"])), 2);
    assert_eq!(code(&gcflow(&["verify", "--spec", "/nonexistent/spec.json"])), 2);
    assert_eq!(code(&gcflow(&["export", "--what", "graph"])), 2);
    assert_eq!(code(&gcflow(&["classify"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"kind": "constant", "value": [1, 0, 0], "extra": 1}"#).unwrap();
    assert_eq!(code(&gcflow(&["classify", "--spec", bad.to_str().unwrap()])), 2);
}

#[test]
fn profile_comes_from_the_environment() {
    let run = |profile: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_gcflow"));
        cmd.args(["verify", "--fixture", "HOPF", "--suite", "lemma-key", "--samples", "10"]);
        match profile {
            Some(p) => cmd.env("GCFLOW_TOL_PROFILE", p),
            None => cmd.env_remove("GCFLOW_TOL_PROFILE"),
        };
        let out = cmd.output().unwrap();
        (code(&out), out.stdout)
    };
    let (c, standard) = run(None);
    assert_eq!(c, 0);
    let (c, strict) = run(Some("strict"));
    assert_eq!(c, 0);
    let key = |bytes: &[u8]| {
        let v: serde_json::Value = serde_json::from_slice(bytes).unwrap();
        v["provenance"]["tolerances"]["key"].as_f64().unwrap()
    };
    assert!((key(&strict) - 0.1 * key(&standard)).abs() < 1e-18);
    assert_eq!(run(Some("bogus")).0, 2);
}

#[test]
fn export_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.csv");
    let out = gcflow(&[
        "export",
        "--fixture",
        "VOL05",
        "--what",
        "field",
        "--samples",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(path).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.ends_with(",status"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert_eq!(row.split(',').count(), header.split(',').count());
        assert!(row.ends_with(",ok"));
    }
}
