//! Pullbacks of generator matrices along curve pairs and projective limits
//! of row combinations.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::curves::{CurvePair, PointCurve};
use super::space::ProjPoint;
use crate::error::{Error, Result};
use crate::moddouble::{DoubleGens, GenMatrix};
use crate::symcore::{PuiseuxSeries, Scalar};

pub type SeriesMatrix = Vec<Vec<PuiseuxSeries>>;

/// Largest truncation tried by [`with_truncation_retry`].
pub const T_MAX: i64 = 1 << 14;

/// Runs `f(T)` for `T = t0, 2 t0, ...` while it reports a truncation
/// problem, giving up past [`T_MAX`].
pub fn with_truncation_retry<R>(t0: i64, mut f: impl FnMut(i64) -> Result<R>) -> Result<R> {
    let mut t = t0.max(1);
    loop {
        match f(t) {
            Err(Error::TruncationTooLow(_)) | Err(Error::IndeterminateLimit(_)) if t < T_MAX => t = (2 * t).min(T_MAX),
            Err(Error::TruncationTooLow(_)) | Err(Error::IndeterminateLimit(_)) => return Err(Error::TruncationExhausted(T_MAX)),
            other => return other,
        }
    }
}

/// Substitutes the curve pair into every entry: `z -> first`, `z' -> second`.
pub fn pullback(d: &DoubleGens, pair: &CurvePair, prec: i64) -> Result<SeriesMatrix> {
    let n = d.base().n();
    if pair.first.dim() != n || pair.second.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: pair.first.dim().min(pair.second.dim()) });
    }
    let subst = pair.series(Rational64::from_integer(prec))?;
    pull_rows(d, &subst)
}

/// Substitutes a single curve into a matrix over `z`.
pub fn pullback_single<G: GenMatrix + ?Sized>(m: &G, curve: &PointCurve, prec: i64) -> Result<SeriesMatrix> {
    if curve.dim() != m.vars().len() {
        return Err(Error::DimensionMismatch { expected: m.vars().len(), got: curve.dim() });
    }
    pull_rows(m, &curve.series(Rational64::from_integer(prec))?)
}

fn pull_rows<G: GenMatrix + ?Sized>(m: &G, subst: &[PuiseuxSeries]) -> Result<SeriesMatrix> {
    m.rows().iter().map(|row| row.iter().map(|e| e.eval_series(subst)).collect()).collect()
}

/// The limit direction of a series vector together with its order.
pub fn proj_limit_with_order(v: &[PuiseuxSeries]) -> Result<(Rational64, ProjPoint)> {
    let mut lead: Option<Rational64> = None;
    for s in v {
        if let Ok(o) = s.ord() {
            lead = Some(lead.map_or(o, |l: Rational64| l.min(o)));
        }
    }
    let Some(l) = lead else {
        return if v.iter().all(PuiseuxSeries::is_exact_zero) {
            Err(Error::ZeroVector)
        } else {
            Err(Error::IndeterminateLimit("no component has a certified nonzero term".into()))
        };
    };
    let mut coords = Vec::with_capacity(v.len());
    for s in v {
        match s.coeff(l) {
            Ok(c) => coords.push(c),
            Err(_) => return Err(Error::IndeterminateLimit(format!("a component is unknown at the leading order t^{l}"))),
        }
    }
    Ok((l, ProjPoint::new(coords)?))
}

/// `[coefficients of t^l]` where `l` is the least order among the components.
pub fn proj_limit(v: &[PuiseuxSeries]) -> Result<ProjPoint> {
    proj_limit_with_order(v).map(|(_, p)| p)
}

/// `psi . D`, a row vector of series.
pub fn combine(dpull: &SeriesMatrix, psi: &[PuiseuxSeries]) -> Result<Vec<PuiseuxSeries>> {
    if psi.len() != dpull.len() {
        return Err(Error::DimensionMismatch { expected: dpull.len(), got: psi.len() });
    }
    let ncols = dpull.first().map_or(0, Vec::len);
    Ok((0..ncols)
        .map(|j| psi.iter().zip(dpull).fold(PuiseuxSeries::zero(), |acc, (c, row)| acc.add(&c.mul(&row[j]))))
        .collect())
}

pub fn limit_of_combination(dpull: &SeriesMatrix, psi: &[PuiseuxSeries]) -> Result<ProjPoint> {
    proj_limit(&combine(dpull, psi)?)
}

/// A row combination for a two-factor matrix (rows `0..p` and `p..2p`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combination {
    /// Constant coefficients, one per row.
    Constant(Vec<Scalar>),
    /// Series coefficients, one per row.
    Series(Vec<PuiseuxSeries>),
    /// `(a t^m g1 - b g2, b g1)` on rows `0` and `p`, where `g1`, `g2` are
    /// the entries of column `col` in those rows. With `a = 0` this cancels
    /// the column; otherwise it is `g1` times `a t^m (1,0) + b (-g2/g1, 1)`.
    Balanced { a: Scalar, b: Scalar, m: u32, col: usize },
}

impl Combination {
    pub fn cancel(col: usize) -> Self {
        Combination::Balanced { a: Scalar::zero(), b: Scalar::one(), m: 0, col }
    }

    /// The coefficient row for a pulled-back matrix.
    pub fn row(&self, dpull: &SeriesMatrix) -> Result<Vec<PuiseuxSeries>> {
        let rows = dpull.len();
        match self {
            Combination::Constant(c) => {
                if c.len() != rows {
                    return Err(Error::DimensionMismatch { expected: rows, got: c.len() });
                }
                Ok(c.iter().map(|s| PuiseuxSeries::constant(s.clone())).collect())
            }
            Combination::Series(s) => {
                if s.len() != rows {
                    return Err(Error::DimensionMismatch { expected: rows, got: s.len() });
                }
                Ok(s.clone())
            }
            Combination::Balanced { a, b, m, col } => {
                if !rows.is_multiple_of(2) || rows == 0 {
                    return Err(Error::DimensionMismatch { expected: 2, got: rows });
                }
                let p = rows / 2;
                let g1 = &dpull[0][*col];
                let g2 = &dpull[p][*col];
                let first = g1.shift(Rational64::from_integer(*m as i64)).scale(a).sub(&g2.scale(b));
                let mut out = vec![PuiseuxSeries::zero(); rows];
                out[0] = first;
                out[p] = g1.scale(b);
                Ok(out)
            }
        }
    }
}

/// Splits on commas outside parentheses.
fn split_top(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// `text` without one pair of enclosing parentheses, if the first one
/// closes at the end.
fn strip_outer(text: &str) -> &str {
    if !text.starts_with('(') {
        return text;
    }
    let mut depth = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return if i + 1 == text.len() { &text[1..i] } else { text };
                }
            }
            _ => {}
        }
    }
    text
}

impl Combination {
    /// `balanced(a=.., b=.., m=.., col=..)`, or a comma-separated list of
    /// series (optionally in parentheses), constant if every entry is.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(rest) = t.strip_prefix("balanced") {
            let inner = rest.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(|| Error::Syntax {
                pos: 0,
                msg: "expected balanced(a=.., b=.., m=.., col=..)".into(),
            })?;
            let (mut a, mut b, mut m, mut col) = (None, None, None, None);
            for item in split_top(inner) {
                let (k, v) = item.split_once('=').ok_or_else(|| Error::Syntax { pos: 0, msg: format!("expected key=value in `{item}`") })?;
                let v = v.trim();
                let int = |v: &str| v.parse::<u32>().map_err(|e| Error::Syntax { pos: 0, msg: format!("`{v}`: {e}") });
                match k.trim() {
                    "a" => a = Some(crate::symcore::parse_scalar(v)?),
                    "b" => b = Some(crate::symcore::parse_scalar(v)?),
                    "m" => m = Some(int(v)?),
                    "col" => col = Some(int(v)? as usize),
                    other => return Err(Error::Syntax { pos: 0, msg: format!("unknown key `{other}`") }),
                }
            }
            return Ok(Combination::Balanced {
                a: a.unwrap_or_else(Scalar::one),
                b: b.unwrap_or_else(Scalar::one),
                m: m.unwrap_or(0),
                col: col.ok_or_else(|| Error::Syntax { pos: 0, msg: "balanced combination needs col".into() })?,
            });
        }
        let body = strip_outer(t);
        let series: Vec<PuiseuxSeries> = split_top(body).into_iter().map(|s| crate::symcore::parse_series(s.trim())).collect::<Result<_>>()?;
        if series.iter().all(|s| s.is_exact() && s.terms().all(|(e, _)| e == Rational64::from_integer(0))) {
            Ok(Combination::Constant(series.iter().map(|s| s.coeff(Rational64::from_integer(0))).collect::<Result<_>>()?))
        } else {
            Ok(Combination::Series(series))
        }
    }
}

impl std::fmt::Display for Combination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Combination::Constant(c) => {
                let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", s.join(", "))
            }
            Combination::Series(s) => {
                let s: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", s.join(", "))
            }
            Combination::Balanced { a, b, m, col } => write!(f, "balanced(a={a}, b={b}, m={m}, col={col})"),
        }
    }
}

/// `psi . D` for a combination. For a balanced combination column `col` is
/// formed as `a t^m g1^2`, which it equals identically; summing the two
/// products instead cancels terms far larger than the result, and with
/// float coefficients the result can fall under the zero tolerance.
pub fn combine_with(dpull: &SeriesMatrix, comb: &Combination) -> Result<Vec<PuiseuxSeries>> {
    let mut v = combine(dpull, &comb.row(dpull)?)?;
    if let Combination::Balanced { a, m, col, .. } = comb {
        let g1 = &dpull[0][*col];
        v[*col] = g1.mul(g1).shift(Rational64::from_integer(*m as i64)).scale(a);
    }
    Ok(v)
}

/// Limit of a combination applied to a pulled-back matrix.
pub fn limit(dpull: &SeriesMatrix, comb: &Combination) -> Result<ProjPoint> {
    proj_limit(&combine_with(dpull, comb)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moddouble::{double_gens, jacobian_module, Variant};
    use crate::projan::curves::{Coef, Reparam};
    use crate::symcore::poly::var_names;
    use crate::symcore::{parse_poly, parse_series};

    #[test]
    fn parse_combinations() {
        assert_eq!(Combination::parse("(1, 0)").unwrap(), Combination::Constant(vec![Scalar::one(), Scalar::zero()]));
        assert_eq!(Combination::parse("1,-1/2").unwrap(), Combination::Constant(vec![Scalar::one(), Scalar::rational(-1, 2)]));
        assert!(matches!(Combination::parse("(t^2, 1)").unwrap(), Combination::Series(v) if v.len() == 2));
        assert!(matches!(Combination::parse("(1+t)*t, 2").unwrap(), Combination::Series(v) if v.len() == 2));
        assert_eq!(
            Combination::parse("balanced(a=1, b=3, m=2, col=1)").unwrap(),
            Combination::Balanced { a: Scalar::one(), b: Scalar::from_int(3), m: 2, col: 1 }
        );
        assert!(Combination::parse("balanced(a=1)").is_err());
        assert!(Combination::parse("(1, )").is_err());
    }

    fn cusp_eta() -> Vec<PuiseuxSeries> {
        vec![parse_series("t^2").unwrap(), parse_series("t^3").unwrap()]
    }

    #[test]
    fn limits_of_vectors() {
        let s8 = Scalar::sqrt_uint(8);
        let v = [
            PuiseuxSeries::monomial(&Scalar::from_int(2) * &(&s8 * &Scalar::i()), Rational64::from_integer(6)),
            parse_series("12*t^8").unwrap(),
            parse_series("32*t^9").unwrap(),
        ];
        assert!(proj_limit(&v).unwrap().approx_eq(&ProjPoint::from_ints(&[1, 0, 0]).unwrap(), 1e-12));
        let v = [parse_series("t^2").unwrap(), parse_series("t^2").unwrap()];
        assert_eq!(proj_limit(&v).unwrap(), ProjPoint::from_ints(&[1, 1]).unwrap());
        assert_eq!(proj_limit(&[PuiseuxSeries::zero(), PuiseuxSeries::zero()]), Err(Error::ZeroVector));
        let unknown = [PuiseuxSeries::big_o(Rational64::from_integer(3))];
        assert!(matches!(proj_limit(&unknown), Err(Error::IndeterminateLimit(_))));
    }

    #[test]
    fn secant_columns() {
        let f = parse_poly("y^2 - x^3", &var_names(&["x", "y"])).unwrap();
        let d = double_gens(&jacobian_module(&f).unwrap(), Variant::B);
        let pair = CurvePair::germ(&cusp_eta(), Reparam::identity(), Reparam::monomial(crate::projan::Coef::int(2), 1));
        let m = pullback(&d, &pair, 32).unwrap();
        // (x - x') f_x' with x - x' = t^2 - 4t^2 = -3t^2 and f_x' = -3(4t^2)^2
        assert_eq!(m[1][2], parse_series("144*t^6").unwrap());
        let dm = double_gens(&jacobian_module(&f).unwrap(), Variant::DMinus);
        let m = pullback(&dm, &pair, 32).unwrap();
        assert_eq!(m[0][1], parse_series("2*t^3").unwrap());
        assert_eq!(m[1][1], parse_series("16*t^3").unwrap());
        let diag = CurvePair::germ(&cusp_eta(), Reparam::identity(), Reparam::identity());
        let m = pullback(&d, &diag, 32).unwrap();
        assert!(m[1][2..].iter().all(PuiseuxSeries::is_exact_zero));
        assert_eq!(limit(&m, &Combination::Constant(vec![Scalar::zero(), Scalar::zero()])), Err(Error::ZeroVector));
    }

    #[test]
    fn retry_doubles() {
        let mut seen = Vec::new();
        let r = with_truncation_retry(8, |t| {
            seen.push(t);
            if t < 64 {
                Err(Error::TruncationTooLow("x".into()))
            } else {
                Ok(t)
            }
        });
        assert_eq!(r, Ok(64));
        assert_eq!(seen, [8, 16, 32, 64]);
        assert_eq!(with_truncation_retry(8, |_| -> Result<()> { Err(Error::IndeterminateLimit("x".into())) }), Err(Error::TruncationExhausted(T_MAX)));
    }

    /// `y^5 = x^8` along `(t^4/2)` and `(e(8/10) t^4 + 4/5 t^13)`: column 1
    /// is `-11 t^9 g1^2` with `g1 = 5 (t^4/2)^32`, far below the products
    /// that cancel to it.
    #[test]
    fn balanced_column_survives_float_cancellation() {
        let f = parse_poly("y^5 - x^8", &var_names(&["x", "y"])).unwrap();
        let d = double_gens(&jacobian_module(&f).unwrap(), Variant::B);
        let eta = vec![parse_series("t^5").unwrap(), parse_series("t^8").unwrap()];
        let r1 = Reparam { base: Coef::int(0), terms: vec![(4, Coef::Value(Scalar::rational(1, 2)))] };
        let r2 = Reparam { base: Coef::int(0), terms: vec![(4, Coef::Root { order: 10, index: 8 }), (13, Coef::Value(Scalar::rational(4, 5)))] };
        let dp = pullback(&d, &CurvePair::germ(&eta, r1, r2), 320).unwrap();
        let comb = Combination::Balanced { a: Scalar::from_int(-11), b: Scalar::from_int(-2), m: 9, col: 1 };
        let v = combine_with(&dp, &comb).unwrap();
        let lead = Rational64::from_integer(265);
        assert_eq!(v[1].leading().unwrap(), (lead, Scalar::rational(-275, 1) * &Scalar::rational(1, 1 << 32) * &Scalar::rational(1, 1 << 32)));
        assert!(v.iter().all(|s| s.ord().unwrap() >= lead));
        assert_eq!(limit(&dp, &comb).unwrap(), ProjPoint::from_ints(&[0, 1, 0, 0, 0, 0]).unwrap());
    }
}
