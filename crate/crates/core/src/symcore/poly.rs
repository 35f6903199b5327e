//! Sparse multivariate polynomials over [`Scalar`].

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::scalar::Scalar;
use super::series::PuiseuxSeries;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl Poly {
    pub fn zero(vars: &[String]) -> Self {
        Poly { vars: vars.to_vec(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[String], c: Scalar) -> Self {
        Self::from_terms(vars, [(vec![0; vars.len()], c)])
    }

    pub fn var(vars: &[String], name: &str) -> Result<Self> {
        let i = index_of(vars, name)?;
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Ok(Self::from_terms(vars, [(e, Scalar::one())]))
    }

    /// Builds from `(exponent vector, coefficient)` pairs; repeated
    /// exponents are summed and zero coefficients dropped.
    ///
    /// Panics if an exponent vector has the wrong length.
    pub fn from_terms(vars: &[String], terms: impl IntoIterator<Item = (Vec<u32>, Scalar)>) -> Self {
        let mut map: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            match map.get_mut(&e) {
                Some(old) => *old = &*old + &c,
                None => {
                    map.insert(e, c);
                }
            }
        }
        map.retain(|_, c| !c.is_zero());
        Poly { vars: vars.to_vec(), terms: map }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Scalar::is_exact)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Degree in one variable.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    fn check_vars(&self, other: &Self) {
        assert_eq!(self.vars, other.vars, "polynomials over different variable lists");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_vars(other);
        Self::from_terms(&self.vars, self.terms.iter().chain(other.terms.iter()).map(|(e, c)| (e.clone(), c.clone())))
    }

    pub fn neg(&self) -> Self {
        Poly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_terms(&self.vars, self.terms.iter().map(|(e, a)| (e.clone(), a * c)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.push((e, ca * cb));
            }
        }
        Self::from_terms(&self.vars, out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(&self.vars, Scalar::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative with respect to the named variable.
    pub fn diff(&self, var: &str) -> Result<Self> {
        Ok(self.diff_index(index_of(&self.vars, var)?))
    }

    pub fn diff_index(&self, i: usize) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
            let mut e2 = e.clone();
            e2[i] -= 1;
            (e2, c * &Scalar::from_int(e[i] as i64))
        });
        Self::from_terms(&self.vars, terms)
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars()).map(|i| self.diff_index(i)).collect()
    }

    pub fn hessian(&self) -> Vec<Vec<Poly>> {
        self.gradient().iter().map(|g| g.gradient()).collect()
    }

    /// Re-expresses the polynomial over `new_vars`, sending variable `i`
    /// to `new_vars[map[i]]`.
    pub fn embed(&self, new_vars: &[String], map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars());
        let terms = self.terms.iter().map(|(e, c)| {
            let mut e2 = vec![0; new_vars.len()];
            for (i, &k) in e.iter().enumerate() {
                e2[map[i]] += k;
            }
            (e2, c.clone())
        });
        Self::from_terms(new_vars, terms)
    }

    /// Substitutes a polynomial for every variable.
    pub fn compose(&self, subs: &[Poly]) -> Result<Self> {
        if subs.len() != self.nvars() {
            return Err(Error::DimensionMismatch { expected: self.nvars(), got: subs.len() });
        }
        let target = match subs.first() {
            Some(p) => p.vars.clone(),
            None => return Ok(self.clone()),
        };
        let mut acc = Self::zero(&target);
        for (e, c) in &self.terms {
            let mut m = Self::constant(&target, c.clone());
            for (s, &k) in subs.iter().zip(e) {
                if k > 0 {
                    m = m.mul(&s.pow(k));
                }
            }
            acc = acc.add(&m);
        }
        Ok(acc)
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.nvars() {
            return Err(Error::DimensionMismatch { expected: self.nvars(), got: point.len() });
        }
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m = &m * &x.pow(k);
                }
            }
            acc = &acc + &m;
        }
        Ok(acc)
    }

    pub fn eval_c64(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = c.to_c64();
            for (x, &k) in point.iter().zip(e) {
                m *= x.powu(k);
            }
            acc += m;
        }
        acc
    }

    /// Substitutes a series for every variable.
    ///
    /// The result is certified below the smallest bound obtained by
    /// propagating each input's truncation through each monomial; exact
    /// inputs give an exact result. Fails with `TruncationTooLow` when the
    /// result has no certified coefficient at all.
    pub fn eval_series(&self, subst: &[PuiseuxSeries]) -> Result<PuiseuxSeries> {
        if subst.len() != self.nvars() {
            return Err(Error::DimensionMismatch { expected: self.nvars(), got: subst.len() });
        }
        for s in subst {
            if let Some(o) = s.order_bound() {
                if o < num_rational::Rational64::from_integer(0) {
                    return Err(Error::DegenerateInput(format!("substituted series has negative order {o}")));
                }
            }
        }
        let mut powers: Vec<Vec<PuiseuxSeries>> = subst.iter().map(|s| vec![PuiseuxSeries::one(), s.clone()]).collect();
        let mut acc = PuiseuxSeries::zero();
        for (e, c) in &self.terms {
            let mut m = PuiseuxSeries::constant(c.clone());
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = powers[i].last().unwrap().mul(&subst[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    m = m.mul(&powers[i][k]);
                }
            }
            acc = acc.add(&m);
        }
        if acc.is_zero_so_far() {
            if let Some(t) = acc.trunc() {
                if t <= num_rational::Rational64::from_integer(0) {
                    return Err(Error::TruncationTooLow("no certified term in the substituted series".into()));
                }
            }
        }
        Ok(acc)
    }
}

pub(crate) fn index_of(vars: &[String], name: &str) -> Result<usize> {
    vars.iter().position(|v| v == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
}

/// Variable names `base[0], base[1], ...` followed by their primed copies.
pub fn doubled_vars(base: &[String]) -> Vec<String> {
    base.iter().cloned().chain(base.iter().map(|v| format!("{v}'"))).collect()
}

pub fn var_names(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // higher total degree first, then reverse lexicographic on exponents
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let parts = keys.into_iter().map(|e| {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], k) })
                .collect();
            super::fmt_term(&self.terms[e], &mono.join("*"))
        });
        write!(f, "{}", super::join_terms(parts))
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct PolyRepr {
    vars: Vec<String>,
    expr: String,
}

impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr { vars: self.vars.clone(), expr: self.to_string() }.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        super::parse::parse_poly(&r.expr, &r.vars).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse::parse_poly;
    use num_rational::Rational64;

    fn xyz() -> Vec<String> {
        var_names(&["x", "y", "z"])
    }

    #[test]
    fn derivatives() {
        let f = parse_poly("x^2 + y^3 + z^4", &xyz()).unwrap();
        assert_eq!(f.diff("x").unwrap(), parse_poly("2*x", &xyz()).unwrap());
        assert_eq!(f.diff("z").unwrap(), parse_poly("4*z^3", &xyz()).unwrap());
        assert!(Poly::constant(&xyz(), Scalar::from_int(5)).diff("x").unwrap().is_zero());
        assert_eq!(f.diff("w"), Err(Error::UnknownVariable("w".into())));
    }

    #[test]
    fn series_substitution() {
        let x = var_names(&["x"]);
        let p = parse_poly("2*x", &x).unwrap();
        let s8 = Scalar::sqrt_uint(8);
        let sub = PuiseuxSeries::monomial(&Scalar::i() * &s8, Rational64::from_integer(6));
        let got = p.eval_series(&[sub]).unwrap();
        let (e, c) = got.leading().unwrap();
        assert_eq!(e, Rational64::from_integer(6));
        assert!((c.to_c64() - Complex64::new(0.0, 2.0 * 8f64.sqrt())).norm() < 1e-14);
        assert_eq!(got.num_terms(), 1);

        let y = var_names(&["y"]);
        let q = parse_poly("3*y^2", &y).unwrap();
        let got = q.eval_series(&[PuiseuxSeries::monomial(Scalar::from_int(-2), Rational64::from_integer(4))]).unwrap();
        assert_eq!(got, PuiseuxSeries::monomial(Scalar::from_int(12), Rational64::from_integer(8)));
    }

    #[test]
    fn curve_lies_on_cusp() {
        let xy = var_names(&["x", "y"]);
        let f = parse_poly("y^2 - x^3", &xy).unwrap();
        let eta = [PuiseuxSeries::polynomial([(2, Scalar::one())]), PuiseuxSeries::polynomial([(3, Scalar::one())])];
        assert!(f.eval_series(&eta).unwrap().is_exact_zero());
    }

    #[test]
    fn embedding_into_doubled_variables() {
        let xy = var_names(&["x", "y"]);
        let d = doubled_vars(&xy);
        let f = parse_poly("y^2 - x^3", &xy).unwrap();
        let g = f.embed(&d, &[2, 3]);
        assert_eq!(g.to_string(), "-x'^3 + y'^2");
    }
}
