//! Curve germs on `X` and pairs of them on `X x X`.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moddouble::linear_var;
use crate::symcore::{Poly, PuiseuxSeries, Scalar};

/// A coefficient that is either a plain scalar or a root of unity kept
/// symbolically as `exp(2 pi i index / order)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coef {
    Value(Scalar),
    Root { order: u32, index: u32 },
}

impl Coef {
    pub fn int(k: i64) -> Self {
        Coef::Value(Scalar::from_int(k))
    }

    pub fn to_scalar(&self) -> Scalar {
        match self {
            Coef::Value(s) => s.clone(),
            Coef::Root { order, index } => Scalar::root_of_unity(*order, *index),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        self.to_scalar().to_c64()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coef::Value(s) => s.is_zero(),
            Coef::Root { .. } => false,
        }
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Value(s) if s.is_compound() => write!(f, "({s})"),
            Coef::Value(s) => write!(f, "{s}"),
            Coef::Root { order, index } => write!(f, "e({index}/{order})"),
        }
    }
}

/// `base + sum c_k t^{e_k}`, a polynomial reparametrization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reparam {
    pub base: Coef,
    pub terms: Vec<(u32, Coef)>,
}

impl Reparam {
    /// `c t + d t^s`.
    pub fn family(c: Coef, d: Coef, s: u32) -> Self {
        Reparam { base: Coef::int(0), terms: vec![(1, c), (s, d)] }
    }

    pub fn identity() -> Self {
        Reparam { base: Coef::int(0), terms: vec![(1, Coef::int(1))] }
    }

    pub fn monomial(c: Coef, e: u32) -> Self {
        Reparam { base: Coef::int(0), terms: vec![(e, c)] }
    }

    pub fn constant(base: Coef) -> Self {
        Reparam { base, terms: Vec::new() }
    }

    pub fn at(base: Coef, terms: Vec<(u32, Coef)>) -> Self {
        Reparam { base, terms }
    }

    pub fn to_series(&self) -> PuiseuxSeries {
        let mut s = PuiseuxSeries::constant(self.base.to_scalar());
        for (e, c) in &self.terms {
            s = s.add(&PuiseuxSeries::monomial(c.to_scalar(), Rational64::from_integer(*e as i64)));
        }
        s
    }

    /// Parses a series string with integer exponents (no roots of unity).
    pub fn parse(text: &str) -> Result<Self> {
        let s = crate::symcore::parse_series(text)?;
        if s.ram() != 1 || !s.is_exact() {
            return Err(Error::DegenerateInput(format!("reparametrization `{text}` must be a polynomial in t")));
        }
        let mut base = Coef::int(0);
        let mut terms = Vec::new();
        for (e, c) in s.terms() {
            let k = e.to_integer();
            if k < 0 {
                return Err(Error::DegenerateInput(format!("negative power in `{text}`")));
            }
            if k == 0 {
                base = Coef::Value(c.clone());
            } else {
                terms.push((k as u32, Coef::Value(c.clone())));
            }
        }
        Ok(Reparam { base, terms })
    }
}

impl fmt::Display for Reparam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.base.is_zero() {
            parts.push(self.base.to_string());
        }
        for (e, c) in &self.terms {
            let m = if *e == 1 { "t".to_string() } else { format!("t^{e}") };
            parts.push(format!("{c}*{m}"));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// A curve germ `t -> z(t)` on `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointCurve {
    /// `z(t) = eta(phi(t))` for a parametrization `eta` of a branch.
    Germ { eta: Vec<PuiseuxSeries>, reparam: Reparam },
    /// On `F = c z_k + G(others) = 0`: the free coordinates follow `free`
    /// (in variable order, skipping `k`) and `z_k = -G/c`.
    Graph { f: Poly, solve: usize, coef: Scalar, free: Vec<Reparam> },
}

/// `outer(inner)`, allowing an inner series of order 0 when `outer` is an
/// exact polynomial.
pub fn substitute(outer: &PuiseuxSeries, inner: &PuiseuxSeries, prec: Rational64) -> Result<PuiseuxSeries> {
    let poly = outer.is_exact() && outer.ram() == 1 && outer.terms().all(|(e, _)| *e.numer() >= 0);
    if poly {
        let mut acc = PuiseuxSeries::zero();
        for (e, c) in outer.terms() {
            acc = acc.add(&inner.pow(*e.numer() as u32).scale(c));
        }
        return Ok(acc);
    }
    outer.compose(inner, prec)
}

impl PointCurve {
    pub fn germ(eta: &[PuiseuxSeries], reparam: Reparam) -> Self {
        PointCurve::Germ { eta: eta.to_vec(), reparam }
    }

    /// A curve on a graph hypersurface through the point whose free
    /// coordinates are `free[i].base`.
    pub fn graph(f: &Poly, free: Vec<Reparam>) -> Result<Self> {
        let (solve, coef) =
            linear_var(f).ok_or_else(|| Error::DegenerateInput("hypersurface is not a graph over a coordinate".into()))?;
        if free.len() + 1 != f.nvars() {
            return Err(Error::DimensionMismatch { expected: f.nvars() - 1, got: free.len() });
        }
        Ok(PointCurve::Graph { f: f.clone(), solve, coef, free })
    }

    pub fn dim(&self) -> usize {
        match self {
            PointCurve::Germ { eta, .. } => eta.len(),
            PointCurve::Graph { f, .. } => f.nvars(),
        }
    }

    /// Coordinates as series in `t`.
    pub fn series(&self, prec: Rational64) -> Result<Vec<PuiseuxSeries>> {
        match self {
            PointCurve::Germ { eta, reparam } => {
                let phi = reparam.to_series();
                eta.iter().map(|c| substitute(c, &phi, prec)).collect()
            }
            PointCurve::Graph { f, solve, coef, free } => {
                let mut z: Vec<PuiseuxSeries> = Vec::with_capacity(f.nvars());
                let mut it = free.iter();
                for i in 0..f.nvars() {
                    z.push(if i == *solve { PuiseuxSeries::zero() } else { it.next().expect("length checked").to_series() });
                }
                let g = f.eval_series(&z)?;
                z[*solve] = g.scale(&(-&coef.inv().ok_or(Error::ZeroSeries)?));
                Ok(z)
            }
        }
    }
}

/// Two curve germs, the first substituted into `z`, the second into `z'`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePair {
    pub first: PointCurve,
    pub second: PointCurve,
}

impl CurvePair {
    pub fn germ(eta: &[PuiseuxSeries], phi1: Reparam, phi2: Reparam) -> Self {
        CurvePair { first: PointCurve::germ(eta, phi1), second: PointCurve::germ(eta, phi2) }
    }

    /// `(z(t), z'(t))` as one list of series.
    pub fn series(&self, prec: Rational64) -> Result<Vec<PuiseuxSeries>> {
        let mut s = self.first.series(prec)?;
        s.extend(self.second.series(prec)?);
        Ok(s)
    }
}
