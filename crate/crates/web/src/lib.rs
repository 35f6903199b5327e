//! Browser demo bindings. Every entry point takes plain strings or numbers
//! and returns a JSON string; errors come back as `{"error": "..."}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use doublefiber::curvefibers::{case_witness, classify_origin_fiber, fiber_dminus, normal_form, to_snd, CaseKind};
use doublefiber::problem::ProblemFile;
use doublefiber::projan::{with_truncation_retry, Coef};
use doublefiber::symcore::parse_scalar;
use doublefiber::Error;

fn render(r: Result<Value, Error>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e.to_string() })).to_string()
}

/// Fiber over the origin of a curve on a plane curve, from a problem file.
#[wasm_bindgen]
pub fn origin_fiber(problem: &str) -> String {
    render((|| {
        let p = ProblemFile::from_json(problem)?;
        let d = classify_origin_fiber(&p.poly()?, &p.standard_germ()?)?;
        Ok(json!({ "classification": d.kind, "fiber": d }))
    })())
}

/// Normal form invariants and the fiber of `D^-` for a curve on a
/// hypersurface.
#[wasm_bindgen]
pub fn normal_form_fiber(problem: &str) -> String {
    render((|| {
        let p = ProblemFile::from_json(problem)?;
        let f = p.poly()?;
        let germ = p.germ()?;
        let nf = normal_form(&f, &germ)?;
        let d = fiber_dminus(&f, &germ)?;
        Ok(json!({ "normal_form": nf, "classification": d.kind, "fiber": d }))
    })())
}

/// Limit along the case witness for `y^n = x^B1` with `c` the
/// `index`-th primitive root of the relevant order.
#[wasm_bindgen]
pub fn witness_limit(n: u32, b1: u32, index: u32, d: &str, a: &str, b: &str) -> String {
    render((|| {
        let case = CaseKind::of(n, b1).ok_or_else(|| Error::HypothesisViolated(format!("no case applies to n = {n}, B1 = {b1}")))?;
        let order = match case {
            CaseKind::A => n,
            CaseKind::B => b1 - n,
        };
        let c = Coef::Root { order, index };
        let w = case_witness(n, b1, c, parse_scalar(d)?, parse_scalar(a)?, parse_scalar(b)?)?;
        let (snd, dropped) = to_snd(&with_truncation_retry(4 * n as i64 * b1 as i64, |t| w.engine_limit(t))?)?;
        Ok(json!({
            "case": format!("{:?}", w.case),
            "phi": w.phi.to_string(),
            "combination": w.combination.to_string(),
            "limit": snd,
            "dropped": dropped,
            "derived": w.derived,
            "printed": w.printed,
            "distance_derived": snd.distance(&w.derived),
            "distance_printed": snd.distance(&w.printed),
        }))
    })())
}
