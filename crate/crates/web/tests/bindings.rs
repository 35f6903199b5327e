use serde_json::Value;

use doublefiber_web::{normal_form_fiber, origin_fiber, witness_limit};

const CUSP: &str = r#"{"variables": ["x", "y"], "f": "y^2 - x^3", "eta": ["t^2", "t^3"]}"#;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn cusp_fiber() {
    assert_eq!(parse(origin_fiber(CUSP))["classification"], "CONORMAL_P1");
    assert!(parse(normal_form_fiber(CUSP))["normal_form"].is_object());
}

#[test]
fn witness_on_a4() {
    let v = parse(witness_limit(2, 5, 1, "1", "1", "1"));
    assert!(v["distance_derived"].as_f64().unwrap() < 1e-9, "{v}");
}

#[test]
fn errors_are_json() {
    assert!(parse(origin_fiber("{")).get("error").is_some());
    assert!(parse(witness_limit(2, 4, 1, "1", "1", "1")).get("error").is_some());
}
