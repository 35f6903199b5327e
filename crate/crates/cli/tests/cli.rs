use std::path::PathBuf;
use std::process::{Command, Output};

use doublefiber::harness::FiberReport;

fn problem(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(format!("{name}.json")).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doublefiber")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fiber_origin_on_cusp() {
    let o = run(&["fiber-origin", "--input", &problem("cusp"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["classification"], "CONORMAL_P1");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = run(&["rank", "--input", &problem("cusp"), "--variant", "B", "--badflag"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(run(&["rank", "--input", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["rank", "--input", &problem("cusp"), "--variant", "Q"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--campaign", "nope", "--input", &problem("cusp")]).status.code(), Some(2));
    let bad = std::env::temp_dir().join("doublefiber-bad.json");
    std::fs::write(&bad, r#"{"variables": ["x"], "f": "x +"}"#).unwrap();
    assert_eq!(run(&["rank", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn case_a_on_e8_is_a_precondition_failure() {
    let o = run(&["verify", "--campaign", "case-A", "--input", &problem("e8"), "--seed", "7"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("case A needs B1 > 2n"));
}

#[test]
fn verify_exit_codes_and_formats_agree() {
    let base = ["verify", "--campaign", "normal-coordinate-vanishing", "--input", &problem("a4"), "--samples", "4"];
    let text = run(&base);
    assert_eq!(text.status.code(), Some(0));
    assert!(stdout(&text).trim_end().lines().last().unwrap().starts_with("PASS"));
    let json = run(&[&base[..], &["--format", "json"]].concat());
    assert_eq!(json.status.code(), Some(0));
    let r: FiberReport = serde_json::from_str(&stdout(&json)).unwrap();
    assert!(r.pass);
    let again: FiberReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(again, r);

    let failing = run(&[&base[..], &["--tol=-1"]].concat());
    assert_eq!(failing.status.code(), Some(1));
    assert!(stdout(&failing).trim_end().lines().last().unwrap().starts_with("FAIL"));
    let failing_json = run(&[&base[..], &["--tol=-1", "--format", "json"]].concat());
    assert_eq!(failing_json.status.code(), Some(1));
    let r: FiberReport = serde_json::from_str(&stdout(&failing_json)).unwrap();
    assert!(!r.pass && !r.violations.is_empty());
}

#[test]
fn limit_of_case_a_witness() {
    let o = run(&["limit", "--input", &problem("a4"), "--phi2", "-t + t^2", "--psi", "balanced(a=1, b=1, m=3, col=1)", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["oracle"]["distance"].as_f64().unwrap() < 1e-6);
    let snd: Vec<String> = serde_json::from_value(v["snd"].clone()).unwrap();
    assert_eq!(snd, ["1", "-1/5", "2/5", "0"]);
}

#[test]
fn other_subcommands_run() {
    for args in [
        vec!["double-gens", "--input", &problem("cusp"), "--variant", "Bpp"],
        vec!["rank", "--input", &problem("a4")],
        vec!["sigma-test", "--input", &problem("cusp"), "--point", "1,1,4,8"],
        vec!["fiber-dminus", "--input", &problem("worked")],
        vec!["smooth-fiber", "--input", &problem("paraboloid")],
        vec!["smooth-fiber", "--input", &problem("graph-xy3"), "--point", "1,-1,0"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run(&["fiber-origin", "--input", &problem("paraboloid")]);
    assert_eq!(o.status.code(), Some(3));
}
