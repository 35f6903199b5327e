//! Brute-force limits: evaluate the combination numerically on small
//! circles `|t| = rho` in multiprecision and read the leading coefficient
//! off a discrete Fourier transform. Nothing here goes through series
//! arithmetic, so it is an independent check of the symbolic route.
//!
//! Fourier mode `r` on a circle of radius `rho` is `sum c_l rho^l` over
//! `l = r (mod CIRCLE_POINTS)`, so each residue class and column yields its
//! own lowest exponent as a slope between two radii. The order is the
//! smallest of them.

use serde::{Deserialize, Serialize};

use super::mp::{direction, log2_norm, Mpc, PRECISION};
use crate::error::{Error, Result};
use crate::moddouble::GenMatrix;
use crate::projan::{Coef, Combination, PointCurve, ProjPoint, Reparam};
use crate::symcore::{Poly, PuiseuxSeries};

/// Sample points per circle.
pub const CIRCLE_POINTS: usize = 8;
/// Pairs of radii, larger first, tried in turn. Higher terms of a residue
/// class can outweigh its leading one when their coefficients are large, so
/// a pair that gives no clean reading is retried much closer to 0. The first
/// pair is kept moderate because cancellation costs more bits per order at
/// smaller radii.
pub const RADII: [[f64; 2]; 2] = [[1e-3, 1e-4], [1e-7, 1e-8]];

const NOISE_MARGIN: usize = 256;
/// How far a slope may sit from an integer.
const SLOPE_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleLimit {
    /// Order in `t` of the combination.
    pub order: i64,
    pub point: ProjPoint,
    /// Share of the sampled norm carried by the leading terms at the smallest
    /// radius; close to 1 unless a higher term has a huge coefficient.
    pub dominance: f64,
}

fn coef(c: &Coef) -> Mpc {
    match c {
        Coef::Value(s) => Mpc::from_scalar(s),
        Coef::Root { order, index } => Mpc::root_of_unity(*order, *index),
    }
}

fn reparam(r: &Reparam, t: &Mpc) -> Mpc {
    r.terms.iter().fold(coef(&r.base), |acc, (e, c)| acc.add(&coef(c).mul(&t.powu(*e))))
}

fn series(s: &PuiseuxSeries, t: &Mpc) -> Result<Mpc> {
    if s.ram() != 1 {
        return Err(Error::DegenerateInput("the numerical check needs integer exponents".into()));
    }
    let mut acc = Mpc::zero();
    for (e, c) in s.raw_terms() {
        if e < 0 {
            return Err(Error::DegenerateInput("negative exponent in a numerical evaluation".into()));
        }
        acc = acc.add(&Mpc::from_scalar(c).mul(&t.powu(e as u32)));
    }
    Ok(acc)
}

/// The value with `log2` of its largest monomial, which bounds the rounding
/// error of the sum.
fn poly_scaled(p: &Poly, z: &[Mpc]) -> (Mpc, f64) {
    p.terms().fold((Mpc::zero(), f64::NEG_INFINITY), |(acc, scale), (e, c)| {
        let m = e.iter().zip(z).fold(Mpc::from_scalar(c), |m, (&k, zi)| if k == 0 { m } else { m.mul(&zi.powu(k)) });
        let l = m.log2_abs();
        (acc.add(&m), scale.max(l))
    })
}

fn poly(p: &Poly, z: &[Mpc]) -> Mpc {
    poly_scaled(p, z).0
}

fn curve(c: &PointCurve, t: &Mpc) -> Result<Vec<Mpc>> {
    match c {
        PointCurve::Germ { eta, reparam: r } => {
            let s = reparam(r, t);
            eta.iter().map(|comp| series(comp, &s)).collect()
        }
        PointCurve::Graph { f, solve, coef: c0, free } => {
            let mut it = free.iter();
            let mut z: Vec<Mpc> =
                (0..f.nvars()).map(|i| if i == *solve { Mpc::zero() } else { reparam(it.next().expect("graph arity"), t) }).collect();
            let g = poly(f, &z);
            z[*solve] = g.div(&Mpc::from_scalar(c0)).neg();
            Ok(z)
        }
    }
}

/// The combined row `psi(t) M(z(t))` at one value of `t`, where `z(t)` is
/// the concatenation of the curves, with `log2` of the largest term summed
/// into each entry.
fn combined_row<G: GenMatrix + ?Sized>(
    g: &G,
    curves: &[PointCurve],
    comb: &Combination,
    t: &Mpc,
) -> Result<Vec<(Mpc, f64)>> {
    let mut z = Vec::with_capacity(g.vars().len());
    for c in curves {
        z.extend(curve(c, t)?);
    }
    if z.len() != g.vars().len() {
        return Err(Error::DimensionMismatch { expected: g.vars().len(), got: z.len() });
    }
    let (m, ms): (Vec<Vec<Mpc>>, Vec<Vec<f64>>) =
        g.rows().iter().map(|row| row.iter().map(|e| poly_scaled(e, &z)).unzip()).unzip();
    let rows = m.len();
    let psi: Vec<(Mpc, f64)> = match comb {
        Combination::Constant(c) => {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, got: c.len() });
            }
            c.iter().map(|x| with_log(Mpc::from_scalar(x))).collect()
        }
        Combination::Series(s) => {
            if s.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, got: s.len() });
            }
            s.iter().map(|x| series(x, t).map(with_log)).collect::<Result<_>>()?
        }
        Combination::Balanced { a, b, m: k, col } => {
            if !rows.is_multiple_of(2) || rows == 0 {
                return Err(Error::DimensionMismatch { expected: 2, got: rows });
            }
            let p = rows / 2;
            let (g1, g2) = (&m[0][*col], &m[p][*col]);
            let (a, b) = (Mpc::from_scalar(a).mul(&t.powu(*k)), Mpc::from_scalar(b));
            let (la, lb) = (a.log2_abs(), b.log2_abs());
            let mut out = vec![(Mpc::zero(), f64::NEG_INFINITY); rows];
            out[0] = (a.mul(g1).sub(&b.mul(g2)), (la + ms[0][*col]).max(lb + ms[p][*col]));
            out[p] = (b.mul(g1), lb + ms[0][*col]);
            out
        }
    };
    let ncols = m.first().map_or(0, |r| r.len());
    Ok((0..ncols)
        .map(|j| {
            (0..rows).filter(|&i| !psi[i].0.is_zero()).fold((Mpc::zero(), f64::NEG_INFINITY), |(acc, scale), i| {
                (acc.add(&psi[i].0.mul(&m[i][j])), scale.max(psi[i].1 + ms[i][j]))
            })
        })
        .collect())
}

fn with_log(v: Mpc) -> (Mpc, f64) {
    let l = v.log2_abs();
    (v, l)
}

/// Fourier mode `r` of samples on the circle, each entry with the largest
/// term scale among its samples.
fn mode(samples: &[Vec<(Mpc, f64)>], omega: &[Mpc], r: usize) -> Vec<(Mpc, f64)> {
    let k = samples.len();
    let shift = -(k.trailing_zeros() as isize);
    (0..samples[0].len())
        .map(|c| {
            let s = (0..k).fold(Mpc::zero(), |acc, j| acc.add(&samples[j][c].0.mul(&omega[(k - (j * r) % k) % k])));
            let scale = samples.iter().map(|x| x[c].1).fold(f64::NEG_INFINITY, f64::max);
            (s.shift(shift), scale)
        })
        .collect()
}

/// Limit of `psi(t) M(z(t))` as `t -> 0`, computed numerically. `curves`
/// supply the variables of `g` in order (one curve for a module on `X`, two
/// for a matrix on `X x X`). Curves and coefficient series must have integer
/// exponents.
pub fn brute_force_limit_oracle<G: GenMatrix + ?Sized>(
    g: &G,
    curves: &[PointCurve],
    comb: &Combination,
) -> Result<OracleLimit> {
    let omega: Vec<Mpc> = (0..CIRCLE_POINTS as u32).map(|j| Mpc::root_of_unity(CIRCLE_POINTS as u32, j)).collect();
    let mut last = None;
    for radii in RADII {
        match on_circles(g, curves, comb, &omega, radii) {
            Err(Error::ExtrapolationUnstable(m)) => last = Some(m),
            other => return other,
        }
    }
    Err(Error::ExtrapolationUnstable(last.expect("at least one pair of radii")))
}

fn on_circles<G: GenMatrix + ?Sized>(
    g: &G,
    curves: &[PointCurve],
    comb: &Combination,
    omega: &[Mpc],
    radii: [f64; 2],
) -> Result<OracleLimit> {
    let k = CIRCLE_POINTS;
    debug_assert!(k.is_power_of_two());
    // modes[radius][residue]
    let mut modes: Vec<Vec<Vec<(Mpc, f64)>>> = Vec::with_capacity(radii.len());
    for rho in radii {
        let r = Mpc::from_c64(num_complex::Complex64::new(rho, 0.0));
        let samples: Vec<Vec<(Mpc, f64)>> = omega.iter().map(|w| combined_row(g, curves, comb, &r.mul(w))).collect::<Result<_>>()?;
        modes.push((0..k).map(|res| mode(&samples, omega, res)).collect());
    }
    // logs[radius][residue][column]. Rounding noise sits near 2^-PRECISION
    // times the largest term summed into an entry; anything within
    // NOISE_MARGIN bits of that counts as zero.
    let floor = (PRECISION - NOISE_MARGIN) as f64;
    let logs: Vec<Vec<Vec<f64>>> = modes
        .iter()
        .map(|m| {
            m.iter()
                .map(|v| {
                    v.iter()
                        .map(|(x, scale)| {
                            let l = x.log2_abs();
                            if l < scale - floor { f64::NEG_INFINITY } else { l }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let modes: Vec<Vec<Vec<Mpc>>> =
        modes.into_iter().map(|m| m.into_iter().map(|v| v.into_iter().map(|(x, _)| x).collect()).collect()).collect();
    // Each entry of each residue class is read on its own, so a column of
    // higher order with a large coefficient cannot mask another column.
    let ncols = logs[0][0].len();
    let decades = (radii[0] / radii[1]).log2();
    let mut orders: Vec<Option<i64>> = vec![None; ncols];
    let mut unresolved: Vec<(usize, usize, f64)> = Vec::new();
    for r in 0..k {
        for c in 0..ncols {
            let (a, b) = (logs[0][r][c], logs[1][r][c]);
            if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
                continue;
            }
            let s = (a - b) / decades;
            let l = s.round();
            if s.is_finite() && (s - l).abs() < SLOPE_TOL && l >= 0.0 && (l as i64).rem_euclid(k as i64) == r as i64 {
                if orders[c].is_none_or(|o| (l as i64) < o) {
                    orders[c] = Some(l as i64);
                }
            } else {
                unresolved.push((r, c, s));
            }
        }
    }
    let Some(order) = orders.iter().flatten().min().copied() else {
        return Err(Error::ExtrapolationUnstable(if unresolved.is_empty() {
            "the combination vanishes on the sample circles".into()
        } else {
            let m: Vec<String> = unresolved.iter().map(|(r, c, s)| format!("mode {r} column {c}: slope {s:.4}")).collect();
            format!("no integer order: {}", m.join(", "))
        }));
    };
    // An entry without a clean slope could still hide a smaller order: the
    // next term of its class, up to CIRCLE_POINTS orders higher, may be what
    // bends the slope upwards.
    if let Some((r, c, s)) = unresolved.iter().find(|(_, _, s)| *s < (order + k as i64) as f64) {
        return Err(Error::ExtrapolationUnstable(format!(
            "order {order} is ambiguous against mode {r} column {c} with slope {s:.4}"
        )));
    }
    let res = order.rem_euclid(k as i64) as usize;
    let lead: Vec<Mpc> = (0..ncols).map(|c| if orders[c] == Some(order) { modes[1][res][c].clone() } else { Mpc::zero() }).collect();
    let total = log2_norm(&modes[1].iter().flatten().cloned().collect::<Vec<_>>());
    let dominance = (log2_norm(&lead) - total).exp2();
    let point = ProjPoint::from_c64(&direction(&lead))?;
    Ok(OracleLimit { order, point, dominance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvefibers::{case_witness, to_snd, CaseKind};
    use crate::moddouble::{double_gens, jacobian_module, Variant};
    use crate::projan::CurvePair;
    use crate::symcore::{parse_series, Scalar};

    #[test]
    fn cusp_conormal_limit() {
        let f = crate::symcore::parse_poly("y^2 - x^3", &crate::symcore::poly::var_names(&["x", "y"])).unwrap();
        let m = jacobian_module(&f).unwrap();
        let eta = vec![parse_series("t^2").unwrap(), parse_series("t^3").unwrap()];
        let c = PointCurve::germ(&eta, Reparam::identity());
        let got = brute_force_limit_oracle(&m, &[c], &Combination::Constant(vec![Scalar::one()])).unwrap();
        assert_eq!(got.order, 3);
        assert!(got.point.approx_eq(&ProjPoint::from_ints(&[0, 1]).unwrap(), 1e-10));
    }

    #[test]
    fn agrees_with_series_route_on_witnesses() {
        for (n, b1, c) in [(2, 5, Coef::int(-1)), (3, 5, Coef::int(-1)), (3, 7, Coef::Root { order: 3, index: 1 })] {
            let case = CaseKind::of(n, b1);
            let w = case_witness(n, b1, c, Scalar::from_int(2), Scalar::from_int(1), Scalar::from_int(3)).unwrap();
            let engine = w.engine_limit(64).unwrap();
            let m = jacobian_module(&w.f).unwrap();
            let d = double_gens(&m, Variant::B);
            let CurvePair { first, second } = w.pair();
            let got = brute_force_limit_oracle(&d, &[first, second], &w.combination).unwrap();
            assert!(got.point.distance(&engine) < 1e-9, "{case:?} {n},{b1}: {} vs {}", got.point, engine);
            let (snd, dropped) = to_snd(&got.point).unwrap();
            assert!(dropped < 1e-9);
            assert!(snd.distance(&w.derived) < 1e-9);
        }
    }

    /// Leading terms from expanding the pulled-back combination exactly; in
    /// both, a higher-order column with a large coefficient shares the
    /// residue class of the leading one.
    #[test]
    fn column_of_higher_order_does_not_mask() {
        let vars = crate::symcore::poly::var_names(&["x", "y"]);
        for (f, e1, e2, phi2, (a, b, m), order) in [
            ("y^3 - x^7", "t^3", "t^7", "5*t - 8*t^3 + 2/5*t^4", ((7, 5), (11, 2), 2), 30),
            ("y^4 - x^7", "t^4", "t^7", "-12*t + 9/2*t^13", ((2, 5), (8, 5), 2), 44),
        ] {
            let d = double_gens(&jacobian_module(&crate::symcore::parse_poly(f, &vars).unwrap()).unwrap(), Variant::B);
            let eta = vec![parse_series(e1).unwrap(), parse_series(e2).unwrap()];
            let curves = [PointCurve::germ(&eta, Reparam::identity()), PointCurve::germ(&eta, Reparam::parse(phi2).unwrap())];
            let comb = Combination::Balanced { a: Scalar::rational(a.0, a.1), b: Scalar::rational(b.0, b.1), m, col: 1 };
            let got = brute_force_limit_oracle(&d, &curves, &comb).unwrap();
            assert_eq!(got.order, order, "{f}");
            assert!(got.point.approx_eq(&ProjPoint::from_ints(&[0, 1, 0, 0, 0, 0]).unwrap(), 1e-10), "{f}: {}", got.point);
        }
    }

    /// With `a = 0` column 1 cancels exactly; what is left there is rounding
    /// noise at the size of the cancelled products, well above the true
    /// leading term of order 104 in column 3.
    #[test]
    fn cancelled_column_is_noise() {
        let vars = crate::symcore::poly::var_names(&["x", "y"]);
        let d = double_gens(&jacobian_module(&crate::symcore::parse_poly("y^3 - x^7", &vars).unwrap()).unwrap(), Variant::B);
        let eta = vec![parse_series("t^3").unwrap(), parse_series("t^7").unwrap()];
        let curves = [
            PointCurve::germ(&eta, Reparam::parse("t^3").unwrap()),
            PointCurve::germ(&eta, Reparam::parse("t^3 + 5/2*t^14").unwrap()),
        ];
        let comb = Combination::Balanced { a: Scalar::zero(), b: Scalar::rational(3, 5), m: 10, col: 1 };
        let got = brute_force_limit_oracle(&d, &curves, &comb).unwrap();
        assert_eq!(got.order, 104);
        assert!(got.point.approx_eq(&ProjPoint::from_ints(&[0, 0, 0, 1, 0, 0]).unwrap(), 1e-10), "{}", got.point);
    }

    #[test]
    fn zero_and_fractional() {
        let f = crate::symcore::parse_poly("y^2 - x^3", &crate::symcore::poly::var_names(&["x", "y"])).unwrap();
        let m = jacobian_module(&f).unwrap();
        let eta = vec![parse_series("t^2").unwrap(), parse_series("t^3").unwrap()];
        let c = PointCurve::germ(&eta, Reparam::identity());
        let zero = Combination::Constant(vec![Scalar::zero()]);
        assert!(matches!(brute_force_limit_oracle(&m, &[c], &zero), Err(Error::ExtrapolationUnstable(_))));
        let eta = vec![parse_series("t").unwrap(), parse_series("t^(3/2)").unwrap()];
        let c = PointCurve::germ(&eta, Reparam::identity());
        let one = Combination::Constant(vec![Scalar::one()]);
        assert!(matches!(brute_force_limit_oracle(&m, &[c], &one), Err(Error::DegenerateInput(_))));
    }
}
