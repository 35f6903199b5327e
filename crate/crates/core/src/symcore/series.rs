//! Truncated Puiseux series in a single variable `t`.
//!
//! A series stores exponents as integers `q` meaning `t^(q/ram)`. The
//! optional truncation `trunc` says that every exponent `< trunc/ram` is
//! known; `None` means the series is exact (a finite sum).

use std::collections::BTreeMap;
use std::fmt;


use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries {
    ram: u32,
    terms: BTreeMap<i64, Scalar>,
    trunc: Option<i64>,
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn add_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

/// Smallest integer `q` with `q/ram >= x`.
fn ceil_units(x: Rational64, ram: u32) -> i64 {
    (x * Rational64::from_integer(ram as i64)).ceil().to_integer()
}

fn binomial(beta: &BigRational, k: u64) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..k {
        acc = acc * (beta - BigRational::from_integer(BigInt::from(j))) / BigRational::from_integer(BigInt::from(j + 1));
    }
    acc
}

impl PuiseuxSeries {
    /// Builds a series from `(q, coef)` pairs meaning `coef * t^(q/ram)`.
    pub fn from_terms(ram: u32, terms: impl IntoIterator<Item = (i64, Scalar)>, trunc: Option<i64>) -> Self {
        assert!(ram > 0, "ramification index must be positive");
        let mut map: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (q, c) in terms {
            match map.get_mut(&q) {
                Some(old) => *old = &*old + &c,
                None => {
                    map.insert(q, c);
                }
            }
        }
        PuiseuxSeries { ram, terms: map, trunc }.normalized()
    }

    pub fn zero() -> Self {
        PuiseuxSeries { ram: 1, terms: BTreeMap::new(), trunc: None }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_terms(1, [(0, c)], None)
    }

    /// The series `t`.
    pub fn t() -> Self {
        Self::monomial(Scalar::one(), Rational64::from_integer(1))
    }

    pub fn monomial(c: Scalar, exp: Rational64) -> Self {
        let ram = *exp.denom() as u32;
        Self::from_terms(ram, [(*exp.numer(), c)], None)
    }

    /// `O(t^exp)`: nothing known at or beyond `exp`.
    pub fn big_o(exp: Rational64) -> Self {
        let ram = *exp.denom() as u32;
        PuiseuxSeries { ram, terms: BTreeMap::new(), trunc: Some(*exp.numer()) }.normalized()
    }

    /// A polynomial in `t` with integer exponents, given as `(exp, coef)`.
    pub fn polynomial(terms: impl IntoIterator<Item = (u32, Scalar)>) -> Self {
        Self::from_terms(1, terms.into_iter().map(|(e, c)| (e as i64, c)), None)
    }

    pub fn ram(&self) -> u32 {
        self.ram
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    /// True when no nonzero coefficient is known.
    pub fn is_zero_so_far(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn trunc(&self) -> Option<Rational64> {
        self.trunc.map(|q| Rational64::new(q, self.ram as i64))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms as `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational64, &Scalar)> + '_ {
        let e = self.ram as i64;
        self.terms.iter().map(move |(q, c)| (Rational64::new(*q, e), c))
    }

    /// Raw `(q, coef)` pairs meaning `coef * t^(q/ram)`.
    pub fn raw_terms(&self) -> impl Iterator<Item = (i64, &Scalar)> + '_ {
        self.terms.iter().map(|(q, c)| (*q, c))
    }

    pub fn is_all_exact_coefficients(&self) -> bool {
        self.terms.values().all(Scalar::is_exact)
    }

    /// Coefficient of `t^exp`, or `TruncationTooLow` when it is not known.
    pub fn coeff(&self, exp: Rational64) -> Result<Scalar> {
        if let Some(t) = self.trunc() {
            if exp >= t {
                return Err(Error::TruncationTooLow(format!("coefficient of t^{exp} requested, known below t^{t}")));
            }
        }
        let scaled = exp * Rational64::from_integer(self.ram as i64);
        if !scaled.is_integer() {
            return Ok(Scalar::zero());
        }
        Ok(self.terms.get(&scaled.to_integer()).cloned().unwrap_or_else(Scalar::zero))
    }

    /// Least exponent with a known nonzero coefficient.
    pub fn ord(&self) -> Result<Rational64> {
        self.leading().map(|(e, _)| e)
    }

    pub fn leading(&self) -> Result<(Rational64, Scalar)> {
        match self.terms.iter().next() {
            Some((q, c)) => Ok((Rational64::new(*q, self.ram as i64), c.clone())),
            None => match self.trunc() {
                Some(t) => Err(Error::TruncationTooLow(format!("no nonzero term certified below t^{t}"))),
                None => Err(Error::ZeroSeries),
            },
        }
    }

    /// A lower bound for the order: the order itself, the truncation for
    /// an unknown series, `None` for the exact zero series.
    pub fn order_bound(&self) -> Option<Rational64> {
        match self.terms.keys().next() {
            Some(q) => Some(Rational64::new(*q, self.ram as i64)),
            None => self.trunc(),
        }
    }

    fn normalized(mut self) -> Self {
        if let Some(t) = self.trunc {
            self.terms.retain(|q, _| *q < t);
        }
        self.terms.retain(|_, c| !c.is_zero());
        let e = self.ram as i64;
        let mut g = e;
        if self.terms.is_empty() {
            if let Some(t) = self.trunc {
                g = g.gcd(&t);
            }
        } else {
            for q in self.terms.keys() {
                g = g.gcd(q);
            }
        }
        if g > 1 {
            self.ram = (e / g) as u32;
            self.terms = std::mem::take(&mut self.terms).into_iter().map(|(q, c)| (q / g, c)).collect();
            self.trunc = self.trunc.map(|t| Integer::div_floor(&t, &g));
        }
        self
    }

    /// Exponents and truncation rescaled to ramification `e`, a multiple of `self.ram`.
    fn lifted(&self, e: u32) -> (BTreeMap<i64, Scalar>, Option<i64>) {
        let f = (e / self.ram) as i64;
        (self.terms.iter().map(|(q, c)| (q * f, c.clone())).collect(), self.trunc.map(|t| t * f))
    }

    /// Drops everything at or beyond `t^exp`.
    pub fn truncate(&self, exp: Rational64) -> Self {
        let e = lcm(self.ram, *exp.denom() as u32);
        let (terms, t) = self.lifted(e);
        let cut = ceil_units(exp, e);
        PuiseuxSeries { ram: e, terms, trunc: min_opt(t, Some(cut)) }.normalized()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let terms = self.terms.iter().map(|(q, a)| (*q, a * c));
        Self::from_terms(self.ram, terms, self.trunc)
    }

    /// Multiplies by `t^exp`.
    pub fn shift(&self, exp: Rational64) -> Self {
        let e = lcm(self.ram, *exp.denom() as u32);
        let (terms, t) = self.lifted(e);
        let d = (exp * Rational64::from_integer(e as i64)).to_integer();
        Self::from_terms(e, terms.into_iter().map(|(q, c)| (q + d, c)), t.map(|t| t + d))
    }

    pub fn add(&self, other: &Self) -> Self {
        let e = lcm(self.ram, other.ram);
        let (mut a, ta) = self.lifted(e);
        let (b, tb) = other.lifted(e);
        for (q, c) in b {
            match a.get_mut(&q) {
                Some(old) => *old = &*old + &c,
                None => {
                    a.insert(q, c);
                }
            }
        }
        PuiseuxSeries { ram: e, terms: a, trunc: min_opt(ta, tb) }.normalized()
    }

    pub fn neg(&self) -> Self {
        PuiseuxSeries { ram: self.ram, terms: self.terms.iter().map(|(q, c)| (*q, -c)).collect(), trunc: self.trunc }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let e = lcm(self.ram, other.ram);
        let (a, ta) = self.lifted(e);
        let (b, tb) = other.lifted(e);
        let va = a.keys().next().copied().or(ta);
        let vb = b.keys().next().copied().or(tb);
        let trunc = min_opt(add_opt(ta, vb), add_opt(tb, va));
        let mut out: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (qa, ca) in &a {
            for (qb, cb) in &b {
                let q = qa + qb;
                if trunc.is_some_and(|t| q >= t) {
                    break;
                }
                let p = ca * cb;
                match out.get_mut(&q) {
                    Some(old) => *old = &*old + &p,
                    None => {
                        out.insert(q, p);
                    }
                }
            }
        }
        PuiseuxSeries { ram: e, terms: out, trunc }.normalized()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self^beta` for a rational exponent, using the principal branch of
    /// the leading coefficient. The result is certified below `t^prec`
    /// unless the input limits it further.
    pub fn powr(&self, beta: Rational64, prec: Rational64) -> Result<Self> {
        if beta.is_integer() && *beta.numer() >= 0 {
            return Ok(self.pow(*beta.numer() as u32));
        }
        let (alpha, c) = self.leading()?;
        // self = c t^alpha (1 + h) with ord h > 0
        let unit = self.shift(-alpha).scale(&c.inv().ok_or(Error::ZeroSeries)?);
        let h = unit.sub(&Self::one());
        let lead_exp = alpha * beta;
        let lead = Self::monomial(c.powr(beta), lead_exp);
        if h.is_exact_zero() {
            return Ok(lead);
        }
        // relative precision needed for the unit part
        let mut rel = prec - lead_exp;
        if let Some(t) = h.trunc() {
            rel = rel.min(t);
        }
        let hord = match h.order_bound() {
            Some(o) => o,
            None => return Ok(lead),
        };
        if rel <= Rational64::zero() {
            return Ok(Self::big_o(lead_exp));
        }
        let beta_big = BigRational::new(BigInt::from(*beta.numer()), BigInt::from(*beta.denom()));
        let mut sum = Self::one().truncate(rel);
        let mut hk = Self::one();
        let mut k: u64 = 1;
        while hord * Rational64::from_integer(k as i64) < rel {
            hk = hk.mul(&h).truncate(rel);
            let b = binomial(&beta_big, k);
            if !b.is_zero() {
                sum = sum.add(&hk.scale(&Scalar::gaussian(b, BigRational::zero())));
            }
            k += 1;
        }
        Ok(sum.mul(&lead))
    }

    /// `1/self` for a series of order 0, certified below `t^prec`.
    pub fn invert_unit(&self, prec: Rational64) -> Result<Self> {
        let o = self.ord()?;
        if !o.is_zero() {
            return Err(Error::NotAUnit(o.to_string()));
        }
        self.powr(Rational64::from_integer(-1), prec)
    }

    /// `self / other`, certified below `t^prec`. Exact when `other` is an
    /// exact monomial.
    pub fn div(&self, other: &Self, prec: Rational64) -> Result<Self> {
        let (beta, c) = other.leading()?;
        if other.is_exact() && other.num_terms() == 1 {
            let inv = c.inv().ok_or(Error::ZeroSeries)?;
            return Ok(self.shift(-beta).scale(&inv));
        }
        let va = match self.order_bound() {
            Some(v) => v,
            None => return Ok(Self::zero()),
        };
        let inv = other.powr(Rational64::from_integer(-1), prec - va)?;
        Ok(self.mul(&inv))
    }

    /// `d/dt`.
    pub fn derivative(&self) -> Self {
        let e = self.ram as i64;
        let terms = self
            .terms
            .iter()
            .filter(|(q, _)| **q != 0)
            .map(|(q, c)| (q - e, c * &Scalar::from_ratio(Rational64::new(*q, e))));
        Self::from_terms(self.ram, terms, self.trunc.map(|t| t - e))
    }

    /// `self(inner(t))`; `inner` must have positive order. Fractional and
    /// negative powers of `inner` are expanded to absolute precision `prec`.
    pub fn compose(&self, inner: &Self, prec: Rational64) -> Result<Self> {
        let alpha = match inner.ord() {
            Ok(a) => a,
            Err(Error::ZeroSeries) => {
                return Err(Error::DegenerateInput("compose with the zero series".into()));
            }
            Err(e) => return Err(e),
        };
        if alpha <= Rational64::zero() {
            return Err(Error::DegenerateInput(format!("compose needs inner order > 0, got {alpha}")));
        }
        let mut out = match self.trunc() {
            Some(t) => Self::big_o(t * alpha),
            None => Self::zero(),
        };
        for (exp, c) in self.terms() {
            let p = inner.powr(exp, prec)?;
            out = out.add(&p.scale(c));
        }
        Ok(out)
    }

    /// Numeric value at `t` (principal branch for fractional powers),
    /// ignoring the unknown tail.
    pub fn eval_c64(&self, t: Complex64) -> Complex64 {
        let e = self.ram as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (q, c) in &self.terms {
            let z = if self.ram == 1 && *q >= 0 {
                t.powu(*q as u32)
            } else if t.norm() == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                (t.ln() * (*q as f64 / e)).exp()
            };
            acc += c.to_c64() * z;
        }
        acc
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = |e: Rational64| -> String {
            if e.is_zero() {
                String::new()
            } else if e.is_integer() && *e.numer() == 1 {
                "t".into()
            } else if e.is_integer() && *e.numer() > 0 {
                format!("t^{}", e.numer())
            } else {
                format!("t^({e})")
            }
        };
        let mut parts: Vec<(bool, String)> = self.terms().map(|(e, c)| super::fmt_term(c, &mono(e))).collect();
        if let Some(t) = self.trunc() {
            let m = mono(t);
            parts.push((false, format!("O({})", if m.is_empty() { "1".into() } else { m })));
        }
        write!(f, "{}", super::join_terms(parts))
    }
}

impl serde::Serialize for PuiseuxSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for PuiseuxSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        super::parse::parse_series(&s).map_err(serde::de::Error::custom)
    }
}
