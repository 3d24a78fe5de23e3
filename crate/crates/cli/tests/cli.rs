use std::path::PathBuf;
use std::process::{Command, Output};

use fockmod_cli::report::{to_json, Report};

fn fockmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockmod")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fockmod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const MINIMAL: &str = r#"{
  "schema": "fockmod/1",
  "name": "minimal",
  "grid": {"dimension": 1, "points": 6, "spacing": 1.0},
  "sigma": {"kind": "delta"},
  "generators": [{"name": "s", "s0": {"point_mass": {"center": [1.0]}}, "s1": "zero"}],
  "vectors": [{"name": "w1", "shape": {"point_mass": {"center": [1.0]}}},
              {"name": "w4", "shape": {"point_mass": {"center": [4.0]}}}],
  "truncation": 2,
  "checks": CHECKS
}"#;

fn minimal(checks: &str) -> String {
    MINIMAL.replace("CHECKS", checks)
}

#[test]
fn list_names_the_bundled_scenarios() {
    let o = fockmod(&["list"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(names, fockmod_cli::scenarios::names());
}

#[test]
fn passing_scenario_exits_zero_with_summary() {
    let o = fockmod(&["model", "--bundled", "delta_locality"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("summary:") && l.ends_with("PASS")), "{text}");
}

#[test]
fn json_report_round_trips_exactly() {
    let o = fockmod(&["model", "--bundled", "poisson_nonlocality", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let report: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&report), text);
    assert!(report.checks.windows(2).all(|w| w[0].name < w[1].name));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = fockmod(&["all", "--bundled", "delta_locality", "--format", "json"]);
    let b = fockmod(&["all", "--bundled", "delta_locality", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("fockmod-cli-out-{}.json", std::process::id()));
    let o = fockmod(&["model", "--bundled", "delta_locality", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let report: Report = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.scenario, "delta_locality");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn config_file_runs_and_subcommand_filters() {
    let path = scratch("ok.json", &minimal(r#"["relative_locality", "weyl_relations"]"#));
    let o = fockmod(&["model", "--config", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Report = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["relative_locality"]);
}

#[test]
fn vacuous_check_fails_with_exit_one() {
    // no module vectors: the anticommutator check has nothing to bound
    let path = scratch("vacuous.json", &minimal(r#"["anticommutator"]"#));
    let o = fockmod(&["model", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("-> FAIL"));
}

#[test]
fn config_errors_exit_two() {
    let cases = [
        ("malformed.json", "{ not json".to_string()),
        ("unknown_check.json", minimal(r#"["frobnicate"]"#)),
        ("wrong_kind.json", minimal(r#"["gauge_phase"]"#)),
        ("unknown_field.json", minimal("[]").replace("\"truncation\"", "\"colour\": 1, \"truncation\"")),
        ("bad_schema.json", minimal("[]").replace("fockmod/1", "fockmod/9")),
    ];
    for (name, contents) in cases {
        let path = scratch(name, &contents);
        let o = fockmod(&["all", "--config", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(!o.stderr.is_empty(), "{name}");
    }
    assert_eq!(fockmod(&["all", "--config", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(fockmod(&["all", "--bundled", "nope"]).status.code(), Some(2));
    assert_eq!(fockmod(&["all"]).status.code(), Some(2));
}
