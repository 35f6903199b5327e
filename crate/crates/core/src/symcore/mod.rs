//! Scalars, multivariate polynomials, truncated Puiseux series and the
//! text grammar shared by all of them.

pub mod parse;
pub mod poly;
pub mod scalar;
pub mod series;

pub use parse::{parse_poly, parse_scalar, parse_series};
pub use poly::Poly;
pub use scalar::{Scalar, TAU_ZERO};
pub use series::PuiseuxSeries;

/// Formats `coef * mono` for use inside a sum. Returns whether the term
/// should be joined with a minus sign, and the body without that sign.
pub(crate) fn fmt_term(coef: &Scalar, mono: &str) -> (bool, String) {
    let neg = coef.is_negative_simple();
    let abs = if neg { -coef } else { coef.clone() };
    let body = if mono.is_empty() {
        if abs.is_compound() {
            format!("({abs})")
        } else {
            abs.to_string()
        }
    } else if abs.is_one() && abs.is_exact() {
        mono.to_string()
    } else if abs.is_compound() {
        format!("({abs})*{mono}")
    } else {
        format!("{abs}*{mono}")
    };
    (neg, body)
}

/// Joins formatted terms into a sum, `0` when empty.
pub(crate) fn join_terms(terms: impl IntoIterator<Item = (bool, String)>) -> String {
    let mut out = String::new();
    for (neg, body) in terms {
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
