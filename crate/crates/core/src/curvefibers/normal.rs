//! The expansion `Df(eta(t)) = tau t^k + mu t^(k+r) + ...` and the second
//! intrinsic derivative.

use std::collections::BTreeSet;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::{CoordinateConvention, CurveGerm, FiberClaim, FiberDescription, FiberKind};
use crate::error::{Error, Result};
use crate::linalg::{self, TAU_RANK};
use crate::projan::{ProjPoint, ProjSubspace};
use crate::symcore::{Poly, PuiseuxSeries, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormInvariants {
    pub k: i64,
    pub r: i64,
    pub tau: ProjPoint,
    pub mu: ProjPoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<ProjPoint>,
    /// Exponent of the `nu` term minus `k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_gap: Option<i64>,
}

fn hermitian(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).fold(Scalar::zero(), |acc, (x, y)| &acc + &(x * &y.conj()))
}

/// `v` minus its projection on the span of the mutually orthogonal `basis`.
pub(crate) fn reduce(v: &[Scalar], basis: &[Vec<Scalar>]) -> Vec<Scalar> {
    let mut out = v.to_vec();
    for b in basis {
        let Some(c) = hermitian(&out, b).checked_div(&hermitian(b, b)) else { continue };
        out = out.iter().zip(b).map(|(x, y)| x - &(&c * y)).collect();
    }
    out
}

pub(crate) fn is_negligible(res: &[Scalar], reference: &[Scalar]) -> bool {
    if res.iter().all(Scalar::is_exact) {
        return res.iter().all(Scalar::is_exact_zero);
    }
    linalg::norm(&linalg::to_c64(res)) <= TAU_RANK * linalg::norm(&linalg::to_c64(reference))
}

/// `k`, `r`, `tau`, `mu` (and `nu` in three or more variables) from the
/// coefficient vectors of `Df(eta(t))`.
pub fn normal_form(f: &Poly, eta: &CurveGerm) -> Result<NormalFormInvariants> {
    if f.nvars() != eta.dim() {
        return Err(Error::DimensionMismatch { expected: f.nvars(), got: eta.dim() });
    }
    let on = f.eval_series(eta.components())?;
    if !on.is_zero_so_far() {
        return Err(Error::NotOnVariety(format!("f(eta(t)) = {on}")));
    }
    let df: Vec<PuiseuxSeries> = f.gradient().iter().map(|g| g.eval_series(eta.components())).collect::<Result<_>>()?;
    let limit = df.iter().filter_map(PuiseuxSeries::trunc).min();
    let mut exps = BTreeSet::new();
    for s in &df {
        for (e, _) in s.terms() {
            if limit.is_none_or(|l| e < l) {
                exps.insert(e);
            }
        }
    }
    let short = |what: &str| match limit {
        Some(l) => Error::TruncationTooLow(format!("no {what} certified below t^{l}")),
        None => Error::DegenerateNormalForm(format!("every coefficient of Df(eta(t)) is parallel to the earlier ones; no {what}")),
    };
    let mut it = exps.into_iter();
    let k = it.next().ok_or_else(|| short("nonzero term"))?;
    let coeffs = |e: Rational64| -> Result<Vec<Scalar>> { df.iter().map(|s| s.coeff(e)).collect() };
    let tau = coeffs(k)?;
    let mut basis = vec![tau.clone()];
    let mut found: Vec<(Rational64, Vec<Scalar>)> = Vec::new();
    let wanted = if f.nvars() >= 3 { 2 } else { 1 };
    for e in it {
        let c = coeffs(e)?;
        let red = reduce(&c, &basis);
        if is_negligible(&red, &c) {
            continue;
        }
        basis.push(red.clone());
        found.push((e, red));
        if found.len() == wanted {
            break;
        }
    }
    let Some((e_mu, mu)) = found.first().cloned() else { return Err(short("direction independent of tau")) };
    let nu = found.get(1).cloned();
    Ok(NormalFormInvariants {
        k: k.to_integer(),
        r: (e_mu - k).to_integer(),
        tau: ProjPoint::new(tau)?,
        mu: ProjPoint::new(mu)?,
        nu_gap: nu.as_ref().map(|(e, _)| (e - k).to_integer()),
        nu: nu.map(|(_, v)| ProjPoint::new(v)).transpose()?,
    })
}

/// The Gauss map extends to an embedding along the branch exactly when `r = 1`.
pub fn gauss_embedding_test(inv: &NormalFormInvariants) -> bool {
    inv.r == 1
}

fn is_zero_vec(v: &[Scalar], scale: f64) -> bool {
    if v.iter().all(Scalar::is_exact) {
        v.iter().all(Scalar::is_exact_zero)
    } else {
        linalg::norm(&linalg::to_c64(v)) <= 1e-12 * scale.max(1.0)
    }
}

/// `Hess F(x) v` minus its component along `grad F(x)`, for `v` tangent at
/// the smooth point `x`.
pub fn second_intrinsic_derivative(f: &Poly, x: &[Scalar], v: &[Scalar]) -> Result<Vec<Scalar>> {
    let n = f.nvars();
    if x.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: if x.len() != n { x.len() } else { v.len() } });
    }
    let value = f.eval(x)?;
    let scale = x.iter().map(Scalar::abs).fold(1.0, f64::max);
    if !is_zero_vec(std::slice::from_ref(&value), scale) {
        return Err(Error::NotOnVariety(format!("F(x) = {value}")));
    }
    let grad: Vec<Scalar> = f.gradient().iter().map(|g| g.eval(x)).collect::<Result<_>>()?;
    if is_zero_vec(&grad, 0.0) {
        return Err(Error::NotSmoothPoint);
    }
    let dv = hermitian(&grad, &v.iter().map(Scalar::conj).collect::<Vec<_>>());
    let tangent = if dv.is_exact() {
        dv.is_exact_zero()
    } else {
        dv.abs() <= TAU_RANK * linalg::norm(&linalg::to_c64(&grad)) * linalg::norm(&linalg::to_c64(v))
    };
    if !tangent {
        return Err(Error::NotTangentVector(dv.to_string()));
    }
    let hess = f.hessian();
    let hv: Vec<Scalar> = hess
        .iter()
        .map(|row| -> Result<Scalar> {
            let mut acc = Scalar::zero();
            for (h, vi) in row.iter().zip(v) {
                acc = &acc + &(&h.eval(x)? * vi);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(reduce(&hv, &[grad]))
}

/// `P(span(tau, mu))`, or `P(span(tau, mu, nu))` when `nu` exists and
/// `r != 1`. For plane curves this is the whole fiber of the reduced double
/// over the origin; otherwise it is contained in it.
pub fn fiber_dminus(f: &Poly, eta: &CurveGerm) -> Result<FiberDescription> {
    if eta.mult() == 1 {
        return Err(Error::MultiplicityOne);
    }
    let inv = normal_form(f, eta)?;
    let mut vectors = vec![inv.tau.coords().to_vec(), inv.mu.coords().to_vec()];
    if let (Some(nu), true) = (&inv.nu, inv.r != 1) {
        vectors.push(nu.coords().to_vec());
    }
    let n = f.nvars();
    Ok(FiberDescription {
        kind: FiberKind::SpanHl,
        subspace: ProjSubspace::span(n, &vectors)?,
        convention: CoordinateConvention::conormal(n),
        claim: if n == 2 { FiberClaim::Equal } else { FiberClaim::Contained },
        within_hypotheses: true,
        note: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::poly::var_names;
    use crate::symcore::parse_poly;

    fn xyz() -> Vec<String> {
        var_names(&["x", "y", "z"])
    }

    fn example() -> (Poly, CurveGerm) {
        let f = parse_poly("x^2 + y^3 + z^4", &xyz()).unwrap();
        let eta = CurveGerm::parse(&["i*sqrt(8)*t^6", "-2*t^4", "2*t^3"]).unwrap();
        (f, eta)
    }

    #[test]
    fn worked_example() {
        let (f, eta) = example();
        let inv = normal_form(&f, &eta).unwrap();
        assert_eq!((inv.k, inv.r, inv.nu_gap), (6, 2, Some(3)));
        assert!(inv.tau.approx_eq(&ProjPoint::from_ints(&[1, 0, 0]).unwrap(), 1e-9));
        assert!(inv.mu.approx_eq(&ProjPoint::from_ints(&[0, 1, 0]).unwrap(), 1e-9));
        assert!(inv.nu.unwrap().approx_eq(&ProjPoint::from_ints(&[0, 0, 1]).unwrap(), 1e-9));
        assert!(!gauss_embedding_test(&normal_form(&f, &eta).unwrap()));
        let fib = fiber_dminus(&f, &eta).unwrap();
        assert_eq!((fib.subspace.dim(), fib.claim), (2, FiberClaim::Contained));
    }

    #[test]
    fn plane_examples() {
        let xy = var_names(&["x", "y"]);
        let cusp = parse_poly("y^2 - x^3", &xy).unwrap();
        let inv = normal_form(&cusp, &CurveGerm::parse(&["t^2", "t^3"]).unwrap()).unwrap();
        assert_eq!((inv.k, inv.r), (3, 1));
        assert_eq!(inv.tau, ProjPoint::from_ints(&[0, 1]).unwrap());
        assert_eq!(inv.mu, ProjPoint::from_ints(&[1, 0]).unwrap());
        assert!(gauss_embedding_test(&inv));
        let a4 = parse_poly("y^2 - x^5", &xy).unwrap();
        let inv = normal_form(&a4, &CurveGerm::parse(&["t^2", "t^5"]).unwrap()).unwrap();
        assert_eq!((inv.k, inv.r), (5, 3));
        assert_eq!(inv.mu, ProjPoint::from_ints(&[1, 0]).unwrap());
        assert!(!gauss_embedding_test(&inv));
        let fib = fiber_dminus(&cusp, &CurveGerm::parse(&["t^2", "t^3"]).unwrap()).unwrap();
        assert_eq!(fib.subspace, ProjSubspace::coordinate(2, &[0, 1]));
        let line = parse_poly("y", &xy).unwrap();
        assert_eq!(fiber_dminus(&line, &CurveGerm::parse(&["t", "0"]).unwrap()), Err(Error::MultiplicityOne));
        assert!(matches!(normal_form(&cusp, &CurveGerm::parse(&["t^2", "t^5"]).unwrap()), Err(Error::NotOnVariety(_))));
        let e = normal_form(&cusp, &CurveGerm::parse(&["t^2 + O(t^4)", "t^3 + O(t^4)"]).unwrap());
        assert!(matches!(e, Err(Error::TruncationTooLow(_))), "{e:?}");
    }

    #[test]
    fn intrinsic_derivative() {
        let vars = xyz();
        let f = parse_poly("z - x^2 - y^2", &vars).unwrap();
        let zero = vec![Scalar::zero(); 3];
        let e1 = vec![Scalar::one(), Scalar::zero(), Scalar::zero()];
        assert_eq!(second_intrinsic_derivative(&f, &zero, &e1).unwrap(), vec![Scalar::from_int(-2), Scalar::zero(), Scalar::zero()]);
        let plane = parse_poly("z + 3*x", &vars).unwrap();
        let v = vec![Scalar::one(), Scalar::zero(), Scalar::from_int(-3)];
        assert!(second_intrinsic_derivative(&plane, &zero, &v).unwrap().iter().all(Scalar::is_exact_zero));
        let e3 = vec![Scalar::zero(), Scalar::zero(), Scalar::one()];
        assert!(matches!(second_intrinsic_derivative(&f, &zero, &e3), Err(Error::NotTangentVector(_))));
        let cone = parse_poly("z^2 - x^2 - y^2", &vars).unwrap();
        assert_eq!(second_intrinsic_derivative(&cone, &zero, &e1), Err(Error::NotSmoothPoint));
    }
}
