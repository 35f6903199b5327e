//! Plane branches in standard normalization: the `SN_D` generator matrix,
//! the fiber of the double over the origin, and the explicit witness curves
//! realizing the tangent component.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::germ::{derivative_ratio, CurveGerm, NormalizationMode};
use super::normal::fiber_dminus;
use super::{CoordinateConvention, FiberClaim, FiberDescription, FiberKind};
use crate::error::{Error, Result};
use crate::moddouble::{double_gens, jacobian_module, Variant};
use crate::projan::{
    limit, pullback, substitute, Coef, Combination, CurvePair, PointCurve, ProjPoint, ProjSubspace, Reparam,
    SeriesMatrix,
};
use crate::symcore::poly::var_names;
use crate::symcore::{Poly, PuiseuxSeries, Scalar};

/// Conormal coordinates of the plane-curve `P^3`.
pub const CONORMAL: [usize; 2] = [0, 1];
pub const TANGENT: usize = 2;
pub const NORMAL: usize = 3;

/// Columns of the variant-`B` double of `J(f)` that make up `SN_D`:
/// `f_x`, `f_y`, `(x - x') f_y'`, `(y - y') f_y'`. The other two,
/// `(x - x') f_x'` and `(y - y') f_x'`, are multiples of these by
/// `-(d eta_2/d eta_1)(phi)`, which vanishes at the origin.
pub const SND_COLUMNS: [usize; 4] = [0, 1, 3, 5];

fn check_reparam(phi: &Reparam) -> Result<()> {
    if !phi.base.is_zero() || phi.terms.is_empty() || phi.terms.iter().any(|(e, _)| *e == 0) {
        return Err(Error::DegenerateInput(format!("reparametrization `{phi}` must vanish at 0 to order >= 1")));
    }
    Ok(())
}

/// The `2 x 4` matrix
/// `[-f_y(eta) R, f_y(eta), 0, 0; -f_y(eta(phi)) R(phi), f_y(eta(phi)), f_y(eta(phi)) (eta(t) - eta(phi))]`
/// with `R = (d eta_2/dt)/(d eta_1/dt)`.
pub fn snd_matrix(f: &Poly, eta: &CurveGerm, phi: &Reparam, prec: i64) -> Result<SeriesMatrix> {
    if f.nvars() != 2 || eta.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: f.nvars().max(eta.dim()) });
    }
    check_reparam(phi)?;
    let p = Rational64::from_integer(prec);
    let comps = eta.components();
    let r = derivative_ratio(&comps[0], &comps[1], prec)?;
    let ps = phi.to_series();
    let r_phi = substitute(&r, &ps, p)?;
    let eta_phi = PointCurve::germ(comps, phi.clone()).series(p)?;
    let fy = f.diff_index(1);
    let g1 = fy.eval_series(comps)?;
    let g2 = fy.eval_series(&eta_phi)?;
    let z = PuiseuxSeries::zero();
    Ok(vec![
        vec![g1.mul(&r).neg(), g1.clone(), z.clone(), z],
        vec![
            g2.mul(&r_phi).neg(),
            g2.clone(),
            g2.mul(&comps[0].sub(&eta_phi[0])),
            g2.mul(&comps[1].sub(&eta_phi[1])),
        ],
    ])
}

fn standard_of(eta: &CurveGerm) -> Result<CurveGerm> {
    match eta.plane() {
        Some(_) => Ok(eta.clone()),
        None => CurveGerm::standard(eta.components().to_vec(), NormalizationMode::default()),
    }
}

/// The fiber of the double of `J(f)` over the origin, in the `P^3` of
/// `SN_D`: the conormal line when `B1 = n + 1`, the tangent component
/// (normal coordinate zero) when `B1 > n + 1`.
pub fn classify_origin_fiber(f: &Poly, eta: &CurveGerm) -> Result<FiberDescription> {
    if eta.dim() == 2 && eta.mult() == 1 {
        return Err(Error::MultiplicityOne);
    }
    let eta = standard_of(eta)?;
    let inv = eta.plane().expect("validated").clone();
    let dminus = fiber_dminus(f, &eta)?.subspace.embed(4, 0)?;
    let (kind, subspace, within, note) = if inv.b1 == inv.n + 1 {
        let within = inv.n == 2;
        let note = (!within).then(|| format!("multiplicity {} > 2 is outside the hypotheses of the Gauss embedding statement", inv.n));
        (FiberKind::ConormalP1, dminus, within, note)
    } else {
        let tangent = ProjSubspace::coordinate(4, &[TANGENT]);
        (FiberKind::TangentComponent, dminus.join(&tangent)?, true, None)
    };
    Ok(FiberDescription {
        kind,
        subspace,
        convention: CoordinateConvention::plane(),
        claim: FiberClaim::Equal,
        within_hypotheses: within,
        note,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseKind {
    /// `B1 > 2n`.
    A,
    /// `n < B1 < 2n`.
    B,
}

impl CaseKind {
    pub fn of(n: u32, b1: u32) -> Option<CaseKind> {
        if b1 > 2 * n {
            Some(CaseKind::A)
        } else if b1 > n && b1 < 2 * n {
            Some(CaseKind::B)
        } else {
            None
        }
    }
}

/// A witness curve pair `(eta, eta(c t + d t^s))` with the row combination
/// `A t^m (1) + B (2)` and the two closed forms for its limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseWitness {
    pub case: CaseKind,
    pub n: u32,
    pub b1: u32,
    pub s: u32,
    pub m: u32,
    pub f: Poly,
    pub eta: Vec<PuiseuxSeries>,
    pub phi: Reparam,
    pub combination: Combination,
    /// The closed form printed with the statement.
    pub printed: ProjPoint,
    /// The closed form from expanding the combination directly.
    pub derived: ProjPoint,
}

/// `c^k = 1`, decided on the exact description of `c`.
fn is_root(c: &Coef, k: u32) -> Result<bool> {
    match c {
        Coef::Root { order, index } => Ok((*index as u64 * k as u64).is_multiple_of(*order as u64)),
        Coef::Value(s) if s.is_exact() => Ok(s.pow(k).is_one()),
        Coef::Value(s) => Err(Error::HypothesisViolated(format!("c = {s} must be exact or a symbolic root of unity"))),
    }
}

/// `<B (B1/n)(c^m - 1), A, -n d B, 0>` in case A and
/// `<B d B1/n, A, B (1 - d^n), 0>` in case B.
pub fn printed_case_limit(case: CaseKind, n: u32, b1: u32, c: &Scalar, d: &Scalar, a: &Scalar, b: &Scalar) -> Result<ProjPoint> {
    let ratio = Scalar::rational(b1 as i64, n as i64);
    let v = match case {
        CaseKind::A => {
            let m = b1 - n;
            vec![b * &(&ratio * &(&c.pow(m) - &Scalar::one())), a.clone(), -&(&Scalar::from_int(n as i64) * &(d * b)), Scalar::zero()]
        }
        CaseKind::B => vec![b * &(d * &ratio), a.clone(), b * &(&Scalar::one() - &d.pow(n)), Scalar::zero()],
    };
    ProjPoint::new(v)
}

/// Leading coefficients of the combination for `eta_2 = a_B1 t^B1 + ...`,
/// `ord f_y(eta) = k`:
/// case A `<B c^k (a B1/n)(1 - c^m), A, -B c^k n c^(n-1) d, 0>`,
/// case B `<-B c^k (a B1 (B1 - n)/n) d/c, A, B c^k (1 - c^n), 0>`.
#[allow(clippy::too_many_arguments)]
pub fn derived_case_limit(
    case: CaseKind,
    n: u32,
    b1: u32,
    a_b1: &Scalar,
    k: u32,
    c: &Scalar,
    d: &Scalar,
    a: &Scalar,
    b: &Scalar,
) -> Result<ProjPoint> {
    let ratio = a_b1 * &Scalar::rational(b1 as i64, n as i64);
    let bck = b * &c.pow(k);
    let one = Scalar::one();
    let v = match case {
        CaseKind::A => {
            let m = b1 - n;
            let t = &(&bck * &Scalar::from_int(n as i64)) * &(&c.pow(n - 1) * d);
            vec![&bck * &(&ratio * &(&one - &c.pow(m))), a.clone(), -&t, Scalar::zero()]
        }
        CaseKind::B => {
            let cinv = c.inv().ok_or(Error::ZeroVector)?;
            let first = &(&bck * &(&ratio * &Scalar::from_int((b1 - n) as i64))) * &(d * &cinv);
            vec![-&first, a.clone(), &bck * &(&one - &c.pow(n)), Scalar::zero()]
        }
    };
    ProjPoint::new(v)
}

/// The witness for `eta = (t^n, t^B1)` on `y^n - x^B1 = 0`, with
/// `phi = c t + d t^s`. Case A needs `c^n = 1 != c^B1`, case B needs
/// `c^(B1 - n) = 1 != c^n`.
pub fn case_witness(n: u32, b1: u32, c: Coef, d: Scalar, a: Scalar, b: Scalar) -> Result<CaseWitness> {
    let bad = |m: String| Error::HypothesisViolated(m);
    if n < 2 {
        return Err(bad(format!("multiplicity n = {n} must be at least 2")));
    }
    if b1.is_multiple_of(n) {
        return Err(bad(format!("B1 = {b1} is a multiple of n = {n}")));
    }
    let case = CaseKind::of(n, b1).ok_or_else(|| bad(format!("B1 = {b1} is neither > 2n nor strictly between n and 2n for n = {n}")))?;
    let (s, m) = match case {
        CaseKind::A => {
            if !is_root(&c, n)? {
                return Err(bad(format!("c = {c} is not an n-th root of unity (n = {n})")));
            }
            if is_root(&c, b1)? {
                return Err(bad(format!("c = {c} is a B1-th root of unity (B1 = {b1})")));
            }
            (b1 - 2 * n + 1, b1 - n)
        }
        CaseKind::B => {
            if !is_root(&c, b1 - n)? {
                return Err(bad(format!("c = {c} is not a (B1 - n)-th root of unity (B1 - n = {})", b1 - n)));
            }
            if is_root(&c, n)? {
                return Err(bad(format!("c = {c} is an n-th root of unity (n = {n})")));
            }
            (2 * n + 1 - b1, n)
        }
    };
    let vars = var_names(&["x", "y"]);
    let f = Poly::from_terms(&vars, [(vec![0, n], Scalar::one()), (vec![b1, 0], Scalar::from_int(-1))]);
    let eta = vec![
        PuiseuxSeries::polynomial([(n, Scalar::one())]),
        PuiseuxSeries::polynomial([(b1, Scalar::one())]),
    ];
    let k = (n - 1) * b1;
    let cs = c.to_scalar();
    let printed = printed_case_limit(case, n, b1, &cs, &d, &a, &b)?;
    let derived = derived_case_limit(case, n, b1, &Scalar::one(), k, &cs, &d, &a, &b)?;
    let phi = Reparam::family(c, Coef::Value(d), s);
    let combination = Combination::Balanced { a, b, m, col: 1 };
    Ok(CaseWitness { case, n, b1, s, m, f, eta, phi, combination, printed, derived })
}

impl CaseWitness {
    pub fn pair(&self) -> CurvePair {
        CurvePair::germ(&self.eta, Reparam::identity(), self.phi.clone())
    }

    /// Limit of the combination applied to the pulled-back variant-`B`
    /// double, as a point of `P^5`.
    pub fn engine_limit(&self, prec: i64) -> Result<ProjPoint> {
        let d = double_gens(&jacobian_module(&self.f)?, Variant::B);
        limit(&pullback(&d, &self.pair(), prec)?, &self.combination)
    }
}

/// The `SN_D` coordinates of a limit of the variant-`B` double of a plane
/// curve, with the relative size of the two dropped coordinates.
pub fn to_snd(p: &ProjPoint) -> Result<(ProjPoint, f64)> {
    if p.len() != 6 {
        return Err(Error::DimensionMismatch { expected: 6, got: p.len() });
    }
    Ok((p.select(&SND_COLUMNS)?, p.relative_magnitude(&[2, 4])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{parse_poly, parse_series};

    fn xy() -> Vec<String> {
        var_names(&["x", "y"])
    }

    #[test]
    fn snd_rows() {
        let f = parse_poly("y^2 - x^3", &xy()).unwrap();
        let eta = CurveGerm::parse(&["t^2", "t^3"]).unwrap();
        let m = snd_matrix(&f, &eta, &Reparam::monomial(Coef::int(2), 1), 32).unwrap();
        assert_eq!(m[0][0], parse_series("-3*t^4").unwrap());
        assert_eq!(m[0][1], parse_series("2*t^3").unwrap());
        // f_x(eta) = -f_y(eta) R
        assert_eq!(m[0][0], f.diff_index(0).eval_series(eta.components()).unwrap());
        assert_eq!(m[1][2], parse_series("-48*t^5").unwrap());
        let diag = snd_matrix(&f, &eta, &Reparam::identity(), 32).unwrap();
        assert!(diag[1][2].is_exact_zero() && diag[1][3].is_exact_zero());
    }

    #[test]
    fn dichotomy() {
        let cusp = parse_poly("y^2 - x^3", &xy()).unwrap();
        let fib = classify_origin_fiber(&cusp, &CurveGerm::parse(&["t^2", "t^3"]).unwrap()).unwrap();
        assert_eq!(fib.kind, FiberKind::ConormalP1);
        assert_eq!(fib.subspace, ProjSubspace::coordinate(4, &[0, 1]));
        let a4 = parse_poly("y^2 - x^5", &xy()).unwrap();
        let fib = classify_origin_fiber(&a4, &CurveGerm::parse(&["t^2", "t^5"]).unwrap()).unwrap();
        assert_eq!(fib.kind, FiberKind::TangentComponent);
        assert_eq!(fib.subspace, ProjSubspace::coordinate(4, &[0, 1, 2]));
        let e = classify_origin_fiber(&parse_poly("y - x^2", &xy()).unwrap(), &CurveGerm::parse(&["t", "t^2"]).unwrap());
        assert_eq!(e, Err(Error::MultiplicityOne));
        let fib = classify_origin_fiber(&parse_poly("y^3 - x^4", &xy()).unwrap(), &CurveGerm::parse(&["t^3", "t^4"]).unwrap()).unwrap();
        assert_eq!(fib.kind, FiberKind::ConormalP1);
        assert!(!fib.within_hypotheses);
    }

    #[test]
    fn witness_guards() {
        let one = || Scalar::one();
        let e = case_witness(2, 4, Coef::int(-1), one(), one(), one());
        assert!(matches!(e, Err(Error::HypothesisViolated(_))));
        assert!(matches!(case_witness(2, 5, Coef::int(1), one(), one(), one()), Err(Error::HypothesisViolated(_))));
        assert!(matches!(case_witness(3, 4, Coef::int(1), one(), one(), one()), Err(Error::HypothesisViolated(_))));
        assert!(matches!(case_witness(3, 10, Coef::Root { order: 3, index: 0 }, one(), one(), one()), Err(Error::HypothesisViolated(_))));
        assert!(case_witness(3, 10, Coef::Root { order: 3, index: 2 }, one(), one(), one()).is_ok());
    }

    #[test]
    fn case_a_small() {
        let w = case_witness(2, 5, Coef::int(-1), Scalar::one(), Scalar::one(), Scalar::one()).unwrap();
        assert_eq!((w.case, w.s, w.m), (CaseKind::A, 2, 3));
        let expected = ProjPoint::from_ints(&[-5, 1, -2, 0]).unwrap();
        assert_eq!(w.printed, expected);
        assert_eq!(w.derived, expected);
        let (snd, dropped) = to_snd(&w.engine_limit(64).unwrap()).unwrap();
        assert_eq!(snd, expected);
        assert_eq!(dropped, 0.0);
    }

    #[test]
    fn case_b_small() {
        let w = case_witness(3, 5, Coef::int(-1), Scalar::from_int(2), Scalar::one(), Scalar::one()).unwrap();
        assert_eq!((w.case, w.s, w.m), (CaseKind::B, 2, 3));
        assert_eq!(w.printed, ProjPoint::new(vec![Scalar::rational(10, 3), Scalar::one(), Scalar::from_int(-7), Scalar::zero()]).unwrap());
        let derived = ProjPoint::new(vec![Scalar::rational(20, 3), Scalar::one(), Scalar::from_int(2), Scalar::zero()]).unwrap();
        assert_eq!(w.derived, derived);
        assert_eq!(to_snd(&w.engine_limit(64).unwrap()).unwrap().0, derived);
    }
}
