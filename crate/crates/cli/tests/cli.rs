use std::path::Path;
use std::process::{Command, Output};

use anisomax_cli::{run_scenario, Command as Cmd, Report, Scenario, EXIT_FAILED, EXIT_INVALID, EXIT_OK};

fn anisomax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anisomax")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json_report(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).expect("stdout holds a report")
}

#[test]
fn identity_suite_passes_with_report() {
    let out = anisomax(&["identity-suite", "--json"]);
    assert_eq!(code(&out), EXIT_OK);
    let r = json_report(&out);
    assert!(r.pass);
    assert_eq!(r.command, "identity-suite");
    assert_eq!(r.seed, 1);
    assert_eq!(r.checks.len(), 4);
    assert_eq!(r.payload["suite"]["samples"], 10_000);
    assert_eq!(r.version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn singular_report_lists_four_points() {
    let out = anisomax(&["singular", "--eps", "1,2,3", "--json"]);
    assert_eq!(code(&out), EXIT_OK);
    let r = json_report(&out);
    let pts = r.payload["points"]["original"].as_array().unwrap();
    assert_eq!(pts.len(), 4);
    for p in pts {
        let p: Vec<f64> = p.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert!((p[0].abs() - 1.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(p[1], 0.0);
        assert!((p[2].abs() - 0.5f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn malformed_json_is_invalid_input() {
    let out = anisomax(&["run", r#"{"command": "singular""#]);
    assert_eq!(code(&out), EXIT_INVALID);
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed scenario"));
    assert!(out.stdout.is_empty());
}

#[test]
fn schema_violations_are_invalid_input() {
    for args in [
        vec!["run", r#"{"command": "singular", "colour": 1}"#],
        vec!["run", r#"{"command": "teleport"}"#],
        vec!["teleport"],
        vec!["validate", "--params", r#"{"sep": 1}"#],
        vec!["validate", "--eps", "1,-2,3"],
        vec!["validate", "--eps", "1,2"],
        vec!["singular", "--eps", "2,2,2"],
        vec!["run", "/nonexistent/scenario.json"],
    ] {
        let out = anisomax(&args);
        assert_eq!(code(&out), EXIT_INVALID, "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn unwritable_output_is_invalid() {
    let out = anisomax(&["singular", "--out", "/nonexistent/dir/report.json"]);
    assert_eq!(code(&out), EXIT_INVALID);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write output"));
}

#[test]
fn failed_assertion_exits_one() {
    let out = anisomax(&["validate", "--eps", "2,2,2", "--json"]);
    assert_eq!(code(&out), EXIT_FAILED);
    let r = json_report(&out);
    assert!(!r.pass);
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    assert_eq!(failed, ["ratio separation"]);
}

#[test]
fn scenario_file_writes_declared_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("classify.json");
    let csv = dir.path().join("classify.csv");
    let scenario = serde_json::json!({
        "command": "classify",
        "material": { "eps": [1.0, 2.0, 3.0] },
        "params": { "directions": 600 },
        "outputs": { "json": json, "csv": csv },
        "seed": 7
    });
    let path = dir.path().join("scenario.json");
    std::fs::write(&path, scenario.to_string()).unwrap();
    let out = anisomax(&["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), EXIT_OK, "{}", String::from_utf8_lossy(&out.stdout));

    let report: Report = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report.seed, 7);
    let columns = report.csv_columns.clone().unwrap();
    assert_eq!(columns, ["lam1", "lam2", "lam3", "s", "t", "K", "Km", "region"]);

    let text = std::fs::read_to_string(&csv).unwrap();
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert_eq!(header.len(), 3);
    assert!(header[1].contains(&report.scenario_hash));
    assert_eq!(header[2], format!("# columns: {}", columns.join(",")));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 1200);
    assert!(rows.iter().all(|r| r.split(',').count() == columns.len()));
}

fn run_twice(args: &[&str]) -> (String, String) {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", p.to_str().unwrap()]);
        assert_eq!(code(&anisomax(&full)), EXIT_OK, "{args:?}");
    }
    let read = |p: &Path| std::fs::read_to_string(p).unwrap();
    (read(&paths[0]), read(&paths[1]))
}

#[test]
fn identical_seeds_give_identical_reports() {
    let (a, b) = run_twice(&["propagate", "--seed", "5", "--params", r#"{"steps": 50}"#]);
    assert_eq!(a, b);
    let (c, d) = run_twice(&["symmetrizer", "--seed", "3", "--params", r#"{"samples": 200}"#]);
    assert_eq!(c, d);
    let (e, _) = run_twice(&["propagate", "--seed", "6", "--params", r#"{"steps": 50}"#]);
    assert_ne!(a, e);
}

#[test]
fn flags_override_scenario_fields() {
    let out = anisomax(&[
        "run",
        r#"{"command": "propagate", "seed": 2, "grid": {"n": 8}, "params": {"steps": 10}}"#,
        "--seed",
        "4",
        "--tmax",
        "0.5",
        "--json",
    ]);
    assert_eq!(code(&out), EXIT_OK);
    let r = json_report(&out);
    assert_eq!(r.seed, 4);
    assert_eq!(r.payload["dt"], 0.05);
    assert!((r.payload["t_final"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn commands_without_reference_values_report_no_checks() {
    let (report, table) = run_scenario(&Scenario::from_json(r#"{"command": "curvature", "material": {"eps": [2, 2, 2]}, "params": {"directions": 50}}"#).unwrap()).unwrap();
    assert!(report.checks.is_empty());
    assert!(report.pass);
    assert_eq!(table.unwrap().rows.len(), 100);
}

#[test]
fn hash_tracks_scenario_content() {
    let a = run_scenario(&Scenario::new(Cmd::Validate)).unwrap().0;
    let mut s = Scenario::new(Cmd::Validate);
    s.outputs.json = Some("elsewhere.json".into());
    assert_eq!(run_scenario(&s).unwrap().0.scenario_hash, a.scenario_hash);
    s.material.eps = [1.0, 2.0, 4.0];
    assert_ne!(run_scenario(&s).unwrap().0.scenario_hash, a.scenario_hash);
}

#[test]
fn asymmetric_law_is_flagged() {
    let s = Scenario::from_json(
        r#"{"command": "symmetrizer", "params": {"expect_symmetric": false, "samples": 100,
            "law": {"kind": "quadratic", "eps0": [[1,0,0],[0,1,0],[0,0,1]], "alpha": [[0,1,0],[0,0,0],[0,0,0]]}}}"#,
    )
    .unwrap();
    let (r, _) = run_scenario(&s).unwrap();
    assert!(r.pass, "{}", r.summary());
}
