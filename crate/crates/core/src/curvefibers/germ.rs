//! Parametrized curve germs and the standard normalization of plane branches.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symcore::{Poly, PuiseuxSeries, Scalar};

/// How the exponents of `eta_2` strictly between `B1` and `B2` are checked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationMode {
    /// They must be multiples of `B1`.
    #[default]
    Literal,
    /// They must lie in the semigroup generated by `n` and `B1`.
    Relaxed,
}

impl FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(NormalizationMode::Literal),
            "relaxed" => Ok(NormalizationMode::Relaxed),
            _ => Err(Error::DegenerateInput(format!("unknown normalization mode `{s}`"))),
        }
    }
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormalizationMode::Literal => "literal",
            NormalizationMode::Relaxed => "relaxed",
        })
    }
}

/// Whether `e` is a non-negative combination of `a` and `b`.
pub fn in_semigroup(e: u64, a: u64, b: u64) -> bool {
    let mut k = 0;
    while k * b <= e {
        if (e - k * b).is_multiple_of(a) {
            return true;
        }
        k += 1;
    }
    false
}

/// Invariants of `eta = (t^n, a t^B1 + ... + a_B2 t^B2 + ...)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneInvariants {
    pub n: u32,
    pub b1: u32,
    pub b2: Option<u32>,
    /// Leading coefficient of `eta_2`.
    pub a_b1: Scalar,
    pub mode: NormalizationMode,
}

/// A curve germ `t -> eta(t)` with `eta(0) = 0`, given by power series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveGerm {
    components: Vec<PuiseuxSeries>,
    mult: u32,
    plane: Option<PlaneInvariants>,
}

impl CurveGerm {
    pub fn new(components: Vec<PuiseuxSeries>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::DegenerateInput("curve germ without components".into()));
        }
        let mut mult: Option<i64> = None;
        for (i, c) in components.iter().enumerate() {
            if c.ram() != 1 {
                return Err(Error::DegenerateInput(format!("component {} has fractional exponents", i + 1)));
            }
            match c.order_bound() {
                Some(o) if o <= Rational64::from_integer(0) => {
                    return Err(Error::DegenerateInput(format!("component {} does not vanish at t = 0", i + 1)))
                }
                _ => {}
            }
            if let Ok(o) = c.ord() {
                let o = o.to_integer();
                mult = Some(mult.map_or(o, |m| m.min(o)));
            }
        }
        let mult = mult.ok_or_else(|| Error::DegenerateInput("constant curve germ".into()))?;
        Ok(CurveGerm { components, mult: mult as u32, plane: None })
    }

    pub fn parse(items: &[&str]) -> Result<Self> {
        Self::new(items.iter().map(|s| crate::symcore::parse_series(s)).collect::<Result<_>>()?)
    }

    /// A plane germ validated as a standard normalization.
    pub fn standard(components: Vec<PuiseuxSeries>, mode: NormalizationMode) -> Result<Self> {
        let mut g = Self::new(components)?;
        g.plane = Some(standard_invariants(&g.components, mode)?);
        Ok(g)
    }

    pub fn components(&self) -> &[PuiseuxSeries] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Multiplicity: the least order among the components.
    pub fn mult(&self) -> u32 {
        self.mult
    }

    pub fn plane(&self) -> Option<&PlaneInvariants> {
        self.plane.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.components.iter().all(PuiseuxSeries::is_exact)
    }

    /// Largest order among the components (for the default truncation).
    pub fn max_ord(&self) -> i64 {
        self.components.iter().filter_map(|c| c.ord().ok()).map(|o| o.to_integer()).max().unwrap_or(0)
    }

    /// Default truncation `4 max(n + B2, deg f * max ord eta)`.
    pub fn default_truncation(&self, f: &Poly) -> i64 {
        let shape = match &self.plane {
            Some(p) => (p.n + p.b2.unwrap_or(p.b1)) as i64,
            None => self.mult as i64,
        };
        4 * shape.max(f.degree() as i64 * self.max_ord()).max(1)
    }
}

fn standard_invariants(eta: &[PuiseuxSeries], mode: NormalizationMode) -> Result<PlaneInvariants> {
    let bad = |m: String| Error::NotStandardNormalization(m);
    if eta.len() != 2 {
        return Err(bad(format!("expected a plane curve, got {} components", eta.len())));
    }
    let e1: Vec<_> = eta[0].terms().collect();
    let n = match (e1.as_slice(), eta[0].is_exact()) {
        ([(e, c)], true) if c.is_one() => e.to_integer() as u32,
        _ => return Err(bad(format!("first component `{}` is not t^n", eta[0]))),
    };
    if n <= 1 {
        return Err(Error::MultiplicityOne);
    }
    let (b1, a_b1) = match eta[1].leading() {
        Ok((e, c)) => (e.to_integer() as u32, c),
        Err(Error::ZeroSeries) => return Err(bad("second component is zero".into())),
        Err(e) => return Err(e),
    };
    if b1 < n {
        return Err(bad(format!("ord eta_2 = {b1} is below n = {n}")));
    }
    if b1 % n == 0 {
        return Err(bad(format!("B1 = {b1} is a multiple of n = {n}")));
    }
    let mut b2 = None;
    let mut g = n.gcd(&b1);
    for (e, _) in eta[1].terms().skip(1) {
        let e = e.to_integer() as u32;
        if !in_semigroup(e as u64, n as u64, b1 as u64) {
            b2 = Some(e);
            g = g.gcd(&e);
            break;
        }
        let ok = match mode {
            NormalizationMode::Literal => e.is_multiple_of(b1),
            NormalizationMode::Relaxed => true,
        };
        if !ok {
            return Err(bad(format!("exponent {e} between B1 and B2 is not a multiple of B1 = {b1}")));
        }
    }
    if b2.is_none() && g > 1 {
        return match eta[1].trunc() {
            Some(t) => Err(Error::TruncationTooLow(format!("no exponent outside <{n}, {b1}> below t^{t}"))),
            None => Err(bad(format!("every exponent lies in <{n}, {b1}>, so the parametrization is not injective"))),
        };
    }
    Ok(PlaneInvariants { n, b1, b2, a_b1, mode })
}

/// `(d eta_2/dt) / (d eta_1/dt)`.
pub fn derivative_ratio(eta1: &PuiseuxSeries, eta2: &PuiseuxSeries, prec: i64) -> Result<PuiseuxSeries> {
    let d1 = eta1.derivative();
    let d2 = eta2.derivative();
    let o1 = d1.ord()?;
    if d2.is_exact_zero() {
        return Ok(PuiseuxSeries::zero());
    }
    let o2 = d2.ord()?;
    if o2 < o1 {
        return Err(Error::NotAnalytic(format!("ord d eta_2/dt = {o2} < ord d eta_1/dt = {o1}")));
    }
    d2.div(&d1, Rational64::from_integer(prec))
}
