use std::path::PathBuf;

use doublefiber::curvefibers::{case_witness, to_snd, FiberKind};
use doublefiber::harness::{brute_force_limit_oracle, run_campaign, Campaign, FiberReport, Target};
use doublefiber::moddouble::{double_gens, jacobian_module, Variant};
use doublefiber::problem::ProblemFile;
use doublefiber::projan::{Coef, CurvePair, ProjPoint};
use doublefiber::symcore::Scalar;
use doublefiber::Error;

fn problem(name: &str) -> ProblemFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(format!("{name}.json"));
    ProblemFile::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run(target: Target, name: &str, samples: usize) -> FiberReport {
    run_campaign(&Campaign::new(target, problem(name)).samples(samples)).unwrap()
}

#[test]
fn same_seed_same_report() {
    let c = Campaign::new(Target::OriginFiberInclusion, problem("a4")).seed(11).samples(15);
    let a = run_campaign(&c).unwrap();
    let b = run_campaign(&c).unwrap();
    assert_eq!(a.evidence, b.evidence);
    assert_eq!(a.violations, b.violations);
    let other = run_campaign(&c.clone().seed(12)).unwrap();
    assert_ne!(a.evidence, other.evidence);
}

#[test]
fn report_json_roundtrip() {
    let r = run(Target::CaseA, "a4", 5);
    let back: FiberReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in ["campaign", "seed", "inputs", "classification", "evidence", "violations", "tolerances", "pass", "runtime_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn case_a_on_a4_matches_expanded_form() {
    let r = run(Target::CaseA, "a4", 20);
    assert!(r.pass, "{r}");
    assert!(r.max_distance() < 1e-8);
    assert!(r.max_oracle_distance() < 1e-6);
}

#[test]
fn case_a_on_e8_is_refused() {
    let err = run_campaign(&Campaign::new(Target::CaseA, problem("e8")).seed(7)).unwrap_err();
    assert!(matches!(err, Error::PreconditionFailed(_)), "{err}");
    assert!(run(Target::CaseWitness, "e8", 5).pass);
}

#[test]
fn rank_doubling_on_cusp() {
    let r = run(Target::RankDoubling, "cusp", 10);
    assert!(r.pass, "{r}");
    assert!(r.evidence[0].detail.as_deref().unwrap().contains("rank of the double = 2"));
}

#[test]
fn origin_classification_in_reports() {
    let r = run(Target::OriginFiberInclusion, "cusp", 10);
    assert!(r.pass, "{r}");
    assert_eq!(r.classification.unwrap().kind, FiberKind::ConormalP1);
    let r = run(Target::NormalCoordinateVanishing, "t3t7", 10);
    assert!(r.pass, "{r}");
    assert_eq!(r.classification.unwrap().kind, FiberKind::TangentComponent);
}

#[test]
fn smooth_span_on_shifted_point() {
    let r = run(Target::SmoothFiberInclusion, "graph-xy3-shifted", 10);
    assert!(r.pass, "{r}");
    assert_eq!(r.classification.unwrap().subspace.dim(), 2);
}

#[test]
fn oracle_on_case_a_example() {
    let w = case_witness(2, 5, Coef::int(-1), Scalar::one(), Scalar::one(), Scalar::one()).unwrap();
    let d = double_gens(&jacobian_module(&w.f).unwrap(), Variant::B);
    let CurvePair { first, second } = w.pair();
    let o = brute_force_limit_oracle(&d, &[first, second], &w.combination).unwrap();
    let (snd, _) = to_snd(&o.point).unwrap();
    assert!(snd.distance(&ProjPoint::from_ints(&[-5, 1, -2, 0]).unwrap()) < 1e-6);
}

#[test]
fn violations_carry_inputs() {
    // An impossible tolerance turns every oracle-checked row into a violation.
    let mut c = Campaign::new(Target::NormalCoordinateVanishing, problem("a4")).samples(3);
    c.tolerances.membership = -1.0;
    let r = run_campaign(&c).unwrap();
    assert!(!r.pass);
    assert_eq!(r.violations.len(), 3);
    for v in &r.violations {
        assert_eq!(v.evidence.curves.len(), 2);
        assert!(v.evidence.psi.is_some());
    }
}
