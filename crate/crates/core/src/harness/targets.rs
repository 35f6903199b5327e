//! The checks behind each [`Target`].

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::draw;
use super::oracle::brute_force_limit_oracle;
use super::{sample_rng, Campaign, Evidence, Target, Tolerances, Violation};
use crate::curvefibers::{
    case_witness, classify_origin_fiber, derived_case_limit, second_intrinsic_derivative, smooth_point_fiber,
    tangent_basis, to_snd, CaseKind, CurveGerm, FiberDescription, FiberKind, PlaneInvariants, SecantOrientation,
    NORMAL, TANGENT,
};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::moddouble::{
    column_span_distance, double_gens, eval_matrix, generator_identity_residuals, generic_rank, jacobian_module,
    linear_var, random_rational, rank_at, singular_locus_test, CurveSampler, DoubleGens, GenMatrix,
    HypersurfaceSampler, PairSampler, PointSampler, Variant, GENERIC_SAMPLES,
};
use crate::problem::ProblemFile;
use crate::projan::{
    block_relation_residual, embed_first, embed_second, gamma_map, lambda_map, lambda_map_with_index, limit,
    row_space, with_truncation_retry, Coef, Combination, CurvePair, PointCurve, ProjPoint, ProjSubspace, Reparam,
    SeriesMatrix,
};
use crate::symcore::{Poly, PuiseuxSeries, Scalar};

const DEFAULT_TRUNCATION: i64 = 32;
/// Redraws allowed when a sampled combination vanishes identically.
const REDRAWS: usize = 8;

#[derive(Default)]
pub(super) struct Outcome {
    pub classification: Option<FiberDescription>,
    pub evidence: Vec<Evidence>,
    pub violations: Vec<Violation>,
}

impl Outcome {
    fn record(&mut self, ev: Evidence, failures: Vec<String>) {
        if !failures.is_empty() {
            self.violations.push(Violation { index: ev.index, message: failures.join("; "), evidence: ev.clone() });
        }
        self.evidence.push(ev);
    }
}

pub(super) fn run(c: &Campaign) -> Result<Outcome> {
    match c.target {
        Target::GeneratorEquivalence => generator_equivalence(c),
        Target::RankDoubling => rank_doubling(c),
        Target::SigmaFormula => sigma_formula(c),
        Target::GammaLambdaRoundtrip => gamma_lambda_roundtrip(c),
        Target::JoinInclusion => join_inclusion(c),
        Target::CaseA => case_campaign(c, Some(CaseKind::A)),
        Target::CaseB => case_campaign(c, Some(CaseKind::B)),
        Target::CaseWitness => case_campaign(c, None),
        Target::OriginFiberInclusion => origin_fiber_inclusion(c),
        Target::NormalCoordinateVanishing => normal_coordinate_vanishing(c),
        Target::SmoothFiberInclusion => smooth_fiber_inclusion(c),
    }
}

fn point_sampler(p: &ProblemFile, f: &Poly) -> Result<Box<dyn PointSampler>> {
    Ok(match p.eta {
        Some(_) => Box::new(CurveSampler::new(p.eta_series()?)),
        None => Box::new(HypersurfaceSampler::new(f)?),
    })
}

fn concat(x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    x.iter().chain(y).cloned().collect()
}

fn exceeds(label: &str, value: f64, tol: f64) -> Option<String> {
    (!(value <= tol)).then(|| format!("{label} {value:.3e} exceeds {tol:.0e}"))
}

/// Engine limit of `psi(t) G(z(t))` with the curves supplying `z` in order.
fn engine_limit<G: GenMatrix + ?Sized>(g: &G, curves: &[PointCurve], comb: &Combination, t0: i64) -> Result<ProjPoint> {
    with_truncation_retry(t0, |t| {
        let prec = Rational64::from_integer(t);
        let mut subst = Vec::with_capacity(g.vars().len());
        for c in curves {
            subst.extend(c.series(prec)?);
        }
        let pull: SeriesMatrix =
            g.rows().iter().map(|row| row.iter().map(|e| e.eval_series(&subst)).collect()).collect::<Result<_>>()?;
        limit(&pull, comb)
    })
}

/// Fills `oracle_distance` and returns a failure message if the oracle
/// disagrees or cannot extrapolate.
fn oracle_check<G: GenMatrix + ?Sized>(
    g: &G,
    curves: &[PointCurve],
    comb: &Combination,
    engine: &ProjPoint,
    tol: &Tolerances,
    ev: &mut Evidence,
) -> Option<String> {
    match brute_force_limit_oracle(g, curves, comb) {
        Ok(o) => {
            let d = o.point.distance(engine);
            ev.oracle_distance = Some(d);
            exceeds("oracle distance", d, tol.oracle)
        }
        Err(e) => Some(format!("oracle failed: {e}")),
    }
}

/// A limit for the first draw whose combination does not vanish.
fn limit_with_redraws<G: GenMatrix + ?Sized>(
    g: &G,
    t0: i64,
    rng: &mut ChaCha8Rng,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Result<(Vec<PointCurve>, Combination)>,
) -> Result<Option<(Vec<PointCurve>, Combination, ProjPoint)>> {
    for _ in 0..REDRAWS {
        let (curves, comb) = draw(rng)?;
        match engine_limit(g, &curves, &comb, t0) {
            Ok(l) => return Ok(Some((curves, comb, l))),
            Err(Error::ZeroVector) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

fn random_row_combination(rows: &Matrix, rng: &mut ChaCha8Rng) -> Vec<Scalar> {
    let alpha: Vec<Scalar> = rows.iter().map(|_| random_rational(rng)).collect();
    (0..rows[0].len()).map(|j| rows.iter().zip(&alpha).fold(Scalar::zero(), |acc, (r, a)| &acc + &(a * &r[j]))).collect()
}

fn generator_equivalence(c: &Campaign) -> Result<Outcome> {
    let f = c.inputs.poly()?;
    let m = jacobian_module(&f)?;
    let mut out = Outcome::default();
    for (i, (name, res)) in generator_identity_residuals(&m).into_iter().enumerate() {
        let zero = res.iter().all(Poly::is_zero);
        let mut ev = Evidence::new(i, "identity");
        ev.detail = Some(name.clone());
        ev.distance = Some(if zero { 0.0 } else { 1.0 });
        out.record(ev, if zero { vec![] } else { vec![format!("identity for {name} leaves a nonzero residual")] });
    }
    let sampler = point_sampler(&c.inputs, &f)?;
    let b = double_gens(&m, Variant::B);
    let bp = double_gens(&m, Variant::BPrime);
    let bpp = double_gens(&m, Variant::BDoublePrime);
    for i in 0..c.sample_count() {
        let mut rng = sample_rng(c.seed, i as u64);
        let x = sampler.sample(&mut rng)?;
        let diagonal = i % 5 == 4;
        let x2 = if diagonal { x.clone() } else { sampler.sample(&mut rng)? };
        let pt = concat(&x, &x2);
        let mb = eval_matrix(&b, &pt)?;
        let d = column_span_distance(&mb, &eval_matrix(&bp, &pt)?).max(column_span_distance(&mb, &eval_matrix(&bpp, &pt)?));
        let mut ev = Evidence::new(i, if diagonal { "column-span-diagonal" } else { "column-span" });
        ev.point = Some(pt);
        ev.distance = Some(d);
        let fail = exceeds("column span distance", d, c.tolerances.symbolic);
        out.record(ev, fail.into_iter().collect());
    }
    Ok(out)
}

fn rank_doubling(c: &Campaign) -> Result<Outcome> {
    let f = c.inputs.poly()?;
    let m = jacobian_module(&f)?;
    let d = double_gens(&m, Variant::B);
    let sampler = point_sampler(&c.inputs, &f)?;
    let pair = PairSampler { first: &*sampler, second: &*sampler };
    let mut rng = sample_rng(c.seed, 0);
    let km = generic_rank(&m, &*sampler, &mut rng, GENERIC_SAMPLES)?;
    let kd = generic_rank(&d, &pair, &mut rng, GENERIC_SAMPLES)?;
    let mut out = Outcome::default();
    let mut ev = Evidence::new(0, "generic-rank");
    ev.detail = Some(format!(
        "k = {} ({} of {} samples at top rank); rank of the double = {} ({} of {}); 2k = {}",
        km.rank,
        km.top_count,
        km.samples,
        kd.rank,
        kd.top_count,
        kd.samples,
        2 * km.rank
    ));
    let fail = (kd.rank != 2 * km.rank).then(|| format!("generic rank of the double is {}, expected {}", kd.rank, 2 * km.rank));
    out.record(ev, fail.into_iter().collect());
    for i in 0..c.sample_count() {
        let mut rng = sample_rng(c.seed, 1 + i as u64);
        let pt = pair.sample(&mut rng)?;
        let (x, x2) = pt.split_at(m.n());
        let rd = rank_at(&d, &pt)?;
        let rsum = rank_at(&m, x)? + rank_at(&m, x2)?;
        let mut ev = Evidence::new(1 + i, "off-diagonal-rank");
        ev.detail = Some(format!("rank of the double {rd}, rank M(x) + rank M(x') = {rsum}"));
        ev.point = Some(pt);
        let fail = (rd != rsum).then(|| format!("off-diagonal rank {rd} differs from {rsum}"));
        out.record(ev, fail.into_iter().collect());
    }
    Ok(out)
}

fn sigma_formula(c: &Campaign) -> Result<Outcome> {
    let f = c.inputs.poly()?;
    let m = jacobian_module(&f)?;
    let d = double_gens(&m, Variant::B);
    let sampler = point_sampler(&c.inputs, &f)?;
    let pair = PairSampler { first: &*sampler, second: &*sampler };
    let mut rng = sample_rng(c.seed, 0);
    let k = generic_rank(&m, &*sampler, &mut rng, GENERIC_SAMPLES)?.rank;
    generic_rank(&d, &pair, &mut rng, GENERIC_SAMPLES)?;
    let origin = vec![Scalar::zero(); m.n()];
    let singular = (f.eval(&origin)?.is_zero() && rank_at(&m, &origin)? < k).then_some(origin);
    let mut out = Outcome::default();
    for i in 0..c.sample_count() {
        let mut rng = sample_rng(c.seed, 1 + i as u64);
        let x = sampler.sample(&mut rng)?;
        let mut x2 = sampler.sample(&mut rng)?;
        let mut x1 = x;
        let kind = match (i % 5, &singular) {
            (1, _) => {
                x2 = x1.clone();
                "diagonal"
            }
            (2, Some(s)) => {
                x1 = s.clone();
                "singular-first"
            }
            (3, Some(s)) => {
                x2 = s.clone();
                "singular-second"
            }
            (4, Some(s)) => {
                x1 = s.clone();
                x2 = s.clone();
                "singular-both"
            }
            _ => "generic",
        };
        let t = singular_locus_test(&m, &d, &x1, &x2)?;
        let mut ev = Evidence::new(i, kind);
        ev.point = Some(concat(&x1, &x2));
        ev.detail = Some(format!("in_sigma = {}, predicted = {}", t.in_sigma, t.predicted));
        let fail = (t.in_sigma != t.predicted).then(|| format!("rank test says {} but the formula says {}", t.in_sigma, t.predicted));
        out.record(ev, fail.into_iter().collect());
    }
    Ok(out)
}

fn gamma_lambda_roundtrip(c: &Campaign) -> Result<Outcome> {
    let f = c.inputs.poly()?;
    let m = jacobian_module(&f)?;
    let b = double_gens(&m, Variant::B);
    let sampler = point_sampler(&c.inputs, &f)?;
    let pair = PairSampler { first: &*sampler, second: &*sampler };
    let n = m.n();
    let mut out = Outcome::default();
    for i in 0..c.sample_count() {
        let mut rng = sample_rng(c.seed, i as u64);
        let pt = pair.sample(&mut rng)?;
        let (x, x2) = pt.split_at(n);
        let mut u = random_row_combination(&eval_matrix(&m, x)?, &mut rng);
        let mut u2 = random_row_combination(&eval_matrix(&m, x2)?, &mut rng);
        match i % 10 {
            0 => u2.iter_mut().for_each(|s| *s = Scalar::zero()),
            5 => u.iter_mut().for_each(|s| *s = Scalar::zero()),
            _ => {}
        }
        let mut ev = Evidence::new(i, "roundtrip");
        ev.point = Some(pt.clone());
        let uu = match ProjPoint::new(concat(&u, &u2)) {
            Ok(p) => p,
            Err(Error::ZeroVector) => {
                ev.detail = Some("both factors singular; skipped".into());
                out.record(ev, vec![]);
                continue;
            }
            Err(e) => return Err(e),
        };
        let vw = gamma_map(x, x2, &uu)?;
        let back = lambda_map(x, x2, &vw)?;
        let d1 = back.distance(&uu);
        let mut d2: f64 = 0.0;
        for j in 0..n {
            match lambda_map_with_index(x, x2, &vw, j) {
                Ok(p) => d2 = d2.max(p.distance(&back)),
                Err(Error::DegenerateInput(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let psi: Vec<Scalar> = (0..b.rows().len()).map(|_| random_rational(&mut rng)).collect();
        let mb = eval_matrix(&b, &pt)?;
        let row: Vec<Scalar> = (0..b.ncols()).map(|j| (0..mb.len()).fold(Scalar::zero(), |acc, r| &acc + &(&psi[r] * &mb[r][j]))).collect();
        let mut d3: f64 = 0.0;
        let mut res = block_relation_residual(x, x2, &vw)?;
        if let Ok(vw2) = ProjPoint::new(row) {
            d3 = gamma_map(x, x2, &lambda_map(x, x2, &vw2)?)?.distance(&vw2);
            res = res.max(block_relation_residual(x, x2, &vw2)?);
        }
        let dist = d1.max(d2).max(d3).max(res);
        ev.limit = Some(vw);
        ev.expected = Some(uu);
        ev.distance = Some(dist);
        ev.detail = Some(format!(
            "lambda(gamma) {d1:.2e}, index spread {d2:.2e}, gamma(lambda) {d3:.2e}, block residual {res:.2e}"
        ));
        let fail = exceeds("round-trip distance", dist, c.tolerances.symbolic);
        out.record(ev, fail.into_iter().collect());
    }
    Ok(out)
}

fn integer_eta(p: &ProblemFile) -> Result<Vec<PuiseuxSeries>> {
    let eta = p.eta_series()?;
    if eta.iter().any(|s| s.ram() != 1) {
        return Err(Error::PreconditionFailed("this campaign needs a parametrization with integer exponents".into()));
    }
    Ok(eta)
}

fn join_inclusion(c: &Campaign) -> Result<Outcome> {
    let f = c.inputs.poly()?;
    let eta = integer_eta(&c.inputs)?;
    let cs = CurveSampler::new(eta.clone());
    let m = jacobian_module(&f)?;
    let two = double_gens(&m, Variant::TwoM);
    let t0 = c.inputs.options.truncation.unwrap_or(DEFAULT_TRUNCATION);
    let k = generic_rank(&m, &cs, &mut sample_rng(c.seed, 0), GENERIC_SAMPLES)?.rank;
    let tol = &c.tolerances;
    let mut out = Outcome::default();
    for i in 0..c.sample_count() {
        let mut rng = sample_rng(c.seed, 1 + i as u64);
        let mut chosen = None;
        for _ in 0..64 {
            let (a, b) = (random_rational(&mut rng), random_rational(&mut rng));
            let (x, x2) = (cs.point_at_root(&a), cs.point_at_root(&b));
            if !crate::moddouble::same_point(&x, &x2) && rank_at(&m, &x)? == k && rank_at(&m, &x2)? == k {
                chosen = Some((a, b, x, x2));
                break;
            }
        }
        let (a, b, x, x2) = chosen.ok_or(Error::SamplerExhausted(64))?;
        let fa = embed_first(&row_space(&m, &x)?)?;
        let fb = embed_second(&row_space(&m, &x2)?)?;
        let join = fa.join(&fb)?;
        let pt = concat(&x, &x2);
        let mut ev = Evidence::new(i, "join-dimension");
        ev.point = Some(pt.clone());
        ev.detail = Some(format!("join of P^{} and P^{} has dimension {}", fa.dim(), fb.dim(), join.dim()));
        let fail = (join.dim() != fa.dim() + fb.dim() + 1).then(|| "the fibers over x and x' are not skew".to_string());
        out.record(ev, fail.into_iter().collect());

        let curves = vec![
            PointCurve::germ(&eta, draw::reparam(&mut rng, Coef::Value(a), 2, 3)),
            PointCurve::germ(&eta, draw::reparam(&mut rng, Coef::Value(b), 2, 3)),
        ];
        let mut combos = vec![
            Combination::Constant(vec![Scalar::one(), Scalar::zero()]),
            Combination::Constant(vec![Scalar::zero(), Scalar::one()]),
        ];
        for _ in 0..3 {
            combos.push(Combination::Series(
                (0..2).map(|_| PuiseuxSeries::monomial(random_rational(&mut rng), Rational64::from_integer(rng.gen_range(0..=2)))).collect(),
            ));
        }
        for (j, comb) in combos.into_iter().enumerate() {
            let l = engine_limit(&two, &curves, &comb, t0)?;
            let (label, endpoint) = match j {
                0 => ("endpoint-first", Some(&fa)),
                1 => ("endpoint-second", Some(&fb)),
                _ => ("join-limit", None),
            };
            let dist = endpoint.map_or_else(|| join.distance(&l), |e| e.distance(&l));
            let mut ev = Evidence::new(i, label);
            ev.curves = curves.clone();
            ev.point = Some(pt.clone());
            ev.limit = Some(l.clone());
            ev.distance = Some(dist);
            let mut fails: Vec<String> = exceeds("distance to the join", dist, tol.symbolic).into_iter().collect();
            fails.extend(oracle_check(&two, &curves, &comb, &l, tol, &mut ev));
            ev.psi = Some(comb);
            out.record(ev, fails);
        }
    }
    Ok(out)
}

struct Branch {
    f: Poly,
    germ: CurveGerm,
    inv: PlaneInvariants,
    t0: i64,
    double: DoubleGens,
}

fn plane_branch(p: &ProblemFile) -> Result<Branch> {
    let f = p.poly()?;
    if f.nvars() != 2 {
        return Err(Error::PreconditionFailed("a plane curve in two variables is required".into()));
    }
    integer_eta(p)?;
    let germ = p.standard_germ()?;
    let inv = germ.plane().cloned().ok_or_else(|| Error::PreconditionFailed("not a plane branch".into()))?;
    let t0 = p.options.truncation.unwrap_or_else(|| germ.default_truncation(&f));
    let double = double_gens(&jacobian_module(&f)?, Variant::B);
    Ok(Branch { f, germ, inv, t0, double })
}

/// Indices `i` with `exp(2 pi i/order)` satisfying the witness conditions.
fn witness_roots(case: CaseKind, n: u32, b1: u32) -> (u32, Vec<u32>) {
    let (order, avoid) = match case {
        CaseKind::A => (n, b1),
        CaseKind::B => (b1 - n, n),
    };
    (order, (0..order).filter(|i| (i * avoid) % order != 0).collect())
}

/// The witness family on the problem's own `f` and `eta`.
#[allow(clippy::too_many_arguments)]
fn witness_on(br: &Branch, case: CaseKind, k: u32, c: Coef, d: Scalar, a: Scalar, b: Scalar) -> Result<crate::curvefibers::CaseWitness> {
    let (n, b1) = (br.inv.n, br.inv.b1);
    let cs = c.to_scalar();
    let mut w = case_witness(n, b1, c, d.clone(), a.clone(), b.clone())?;
    w.f = br.f.clone();
    w.eta = br.germ.components().to_vec();
    w.derived = derived_case_limit(case, n, b1, &br.inv.a_b1, k, &cs, &d, &a, &b)?;
    Ok(w)
}

fn fy_order(br: &Branch) -> Result<u32> {
    let o = br.f.diff_index(1).eval_series(br.germ.components())?.ord()?;
    if !o.is_integer() || *o.numer() < 0 {
        return Err(Error::PreconditionFailed(format!("ord f_y(eta) = {o} is not a non-negative integer")));
    }
    Ok(*o.numer() as u32)
}

fn case_campaign(c: &Campaign, want: Option<CaseKind>) -> Result<Outcome> {
    let br = plane_branch(&c.inputs)?;
    let (n, b1) = (br.inv.n, br.inv.b1);
    let case = CaseKind::of(n, b1)
        .ok_or_else(|| Error::PreconditionFailed(format!("n = {n}, B1 = {b1} is in neither case (B1 > 2n or n < B1 < 2n)")))?;
    if let Some(w) = want {
        if w != case {
            let need = match w {
                CaseKind::A => "B1 > 2n",
                CaseKind::B => "n < B1 < 2n",
            };
            return Err(Error::PreconditionFailed(format!("case {w:?} needs {need}; this branch has n = {n}, B1 = {b1}")));
        }
    }
    let eta2 = &br.germ.components()[1];
    if !(eta2.is_exact() && eta2.num_terms() == 1) {
        return Err(Error::PreconditionFailed("the witness family needs eta_2 = a t^B1 exactly".into()));
    }
    let k = fy_order(&br)?;
    let (order, valid) = witness_roots(case, n, b1);
    if valid.is_empty() {
        return Err(Error::PreconditionFailed(format!("no root of unity of order {order} meets the witness conditions")));
    }
    let label = match case {
        CaseKind::A => "case-A",
        CaseKind::B => "case-B",
    };
    let tol = &c.tolerances;
    let mut out = Outcome::default();
    for i in 0..c.sample_count() {
        let mut rng = sample_rng(c.seed, i as u64);
        let coef = Coef::Root { order, index: *valid.choose(&mut rng).expect("nonempty") };
        let (d, a, b) = (random_rational(&mut rng), random_rational(&mut rng), random_rational(&mut rng));
        let w = witness_on(&br, case, k, coef, d, a, b)?;
        let CurvePair { first, second } = w.pair();
        let curves = vec![first, second];
        let engine = engine_limit(&br.double, &curves, &w.combination, br.t0)?;
        let (snd, dropped) = to_snd(&engine)?;
        let dist = snd.distance(&w.derived);
        let mut ev = Evidence::new(i, label);
        ev.detail = Some(format!("dropped coordinates {dropped:.2e}, distance to the printed form {:.3e}", snd.distance(&w.printed)));
        ev.limit = Some(snd);
        ev.expected = Some(w.derived.clone());
        ev.reference = Some(w.printed.clone());
        ev.distance = Some(dist);
        let mut fails: Vec<String> = exceeds("distance to the closed form", dist, tol.symbolic).into_iter().collect();
        fails.extend(exceeds("dropped coordinates", dropped, tol.symbolic));
        fails.extend(oracle_check(&br.double, &curves, &w.combination, &engine, tol, &mut ev));
        ev.curves = curves;
        ev.psi = Some(w.combination);
        out.record(ev, fails);
    }
    Ok(out)
}

/// Size of the coordinates that must vanish on the fiber.
fn off_fiber(kind: FiberKind, snd: &ProjPoint) -> f64 {
    match kind {
        FiberKind::ConormalP1 => snd.relative_magnitude(&[TANGENT, NORMAL]),
        _ => snd.relative_magnitude(&[NORMAL]),
    }
}

fn origin_fiber_inclusion(c: &Campaign) -> Result<Outcome> {
    let br = plane_branch(&c.inputs)?;
    let class = classify_origin_fiber(&br.f, &br.germ)?;
    let (n, b1) = (br.inv.n, br.inv.b1);
    let eta = br.germ.components().to_vec();
    let mut orders: Vec<u32> = vec![n, b1, b1 - n, 2 * n, 3, 4, 5];
    orders.sort_unstable();
    orders.dedup();
    let tol = &c.tolerances;
    let mut out = Outcome::default();
    let mut realized = Vec::new();
    let mut check_limit = |out: &mut Outcome, i: usize, label: &str, curves: Vec<PointCurve>, comb: Combination, l: ProjPoint| -> Result<()> {
        let (snd, dropped) = to_snd(&l)?;
        let dist = off_fiber(class.kind, &snd).max(class.subspace.distance(&snd));
        let mut ev = Evidence::new(i, label);
        ev.distance = Some(dist);
        ev.detail = Some(format!("dropped coordinates {dropped:.2e}"));
        let mut fails: Vec<String> = exceeds("distance to the fiber", dist, tol.membership).into_iter().collect();
        fails.extend(exceeds("dropped coordinates", dropped, tol.membership));
        fails.extend(oracle_check(&br.double, &curves, &comb, &l, tol, &mut ev));
        ev.limit = Some(snd.clone());
        ev.curves = curves;
        ev.psi = Some(comb);
        realized.push(snd);
        out.record(ev, fails);
        Ok(())
    };
    for i in 0..c.sample_count() {
        let mut rng = sample_rng(c.seed, i as u64);
        let drawn = limit_with_redraws(&br.double, br.t0, &mut rng, |rng| {
            let (p1, p2) = draw::origin_pair(rng, &orders);
            let comb = draw::combination(rng, 2, &[0, 1], 12);
            Ok((vec![PointCurve::germ(&eta, p1), PointCurve::germ(&eta, p2)], comb))
        })?;
        match drawn {
            Some((curves, comb, l)) => check_limit(&mut out, i, "sample", curves, comb, l)?,
            None => out.record(Evidence::new(i, "sample"), vec![format!("every one of {REDRAWS} draws vanished identically")]),
        }
    }
    // witnesses for the spanning set
    let witness_index = c.sample_count();
    let pair = |phi: Reparam| vec![PointCurve::germ(&eta, Reparam::identity()), PointCurve::germ(&eta, phi)];
    let mut witnesses = vec![
        (pair(Reparam::monomial(Coef::int(2), 1)), Combination::Constant(vec![Scalar::one(), Scalar::zero()])),
        (pair(Reparam::monomial(Coef::int(2), 1)), Combination::cancel(1)),
    ];
    if let Some(case) = CaseKind::of(n, b1) {
        let (order, valid) = witness_roots(case, n, b1);
        if let Some(&idx) = valid.first() {
            let k = fy_order(&br)?;
            for (d, a) in [(1, 1), (2, -1)] {
                let w = witness_on(&br, case, k, Coef::Root { order, index: idx }, Scalar::from_int(d), Scalar::from_int(a), Scalar::one())?;
                witnesses.push((pair(w.phi.clone()), w.combination.clone()));
            }
        }
    }
    for (curves, comb) in witnesses {
        let l = engine_limit(&br.double, &curves, &comb, br.t0)?;
        check_limit(&mut out, witness_index, "witness", curves, comb, l)?;
    }
    let span = ProjSubspace::from_points(&realized)?;
    let full = span.contains_subspace(&class.subspace, tol.membership);
    let mut ev = Evidence::new(witness_index, "realized-span");
    ev.distance = Some(if full { 0.0 } else { 1.0 });
    ev.detail = Some(format!("limits span a P^{}; the fiber is a P^{}", span.dim(), class.subspace.dim()));
    let fail = (!full).then(|| "the sampled and witness limits do not span the fiber".to_string());
    out.record(ev, fail.into_iter().collect());
    out.classification = Some(class);
    Ok(out)
}

fn normal_coordinate_vanishing(c: &Campaign) -> Result<Outcome> {
    let br = plane_branch(&c.inputs)?;
    let class = classify_origin_fiber(&br.f, &br.germ)?;
    let n = br.inv.n;
    let eta = br.germ.components().to_vec();
    let tol = &c.tolerances;
    let mut out = Outcome::default();
    for i in 0..c.sample_count() {
        let mut rng = sample_rng(c.seed, i as u64);
        let drawn = limit_with_redraws(&br.double, br.t0, &mut rng, |rng| {
            let s = rng.gen_range(1..=3u32);
            let r = rng.gen_range(s + 1..=s + 12);
            let root = Coef::Root { order: n, index: rng.gen_range(0..n) };
            let phi1 = Reparam::monomial(Coef::int(1), s);
            let phi2 = Reparam::at(Coef::int(0), vec![(s, root), (r, draw::coef(rng))]);
            let comb = Combination::Balanced {
                a: if rng.gen_bool(0.2) { Scalar::zero() } else { random_rational(rng) },
                b: random_rational(rng),
                m: rng.gen_range(0..=12),
                col: 1,
            };
            Ok((vec![PointCurve::germ(&eta, phi1), PointCurve::germ(&eta, phi2)], comb))
        })?;
        let Some((curves, comb, l)) = drawn else {
            out.record(Evidence::new(i, "normal-coordinate"), vec![format!("every one of {REDRAWS} draws vanished identically")]);
            continue;
        };
        let (snd, dropped) = to_snd(&l)?;
        let normal = snd.relative_magnitude(&[NORMAL]);
        let mut ev = Evidence::new(i, "normal-coordinate");
        ev.distance = Some(normal);
        ev.detail = Some(format!("dropped coordinates {dropped:.2e}"));
        let mut fails: Vec<String> = exceeds("normal coordinate", normal, tol.membership).into_iter().collect();
        fails.extend(exceeds("dropped coordinates", dropped, tol.membership));
        fails.extend(oracle_check(&br.double, &curves, &comb, &l, tol, &mut ev));
        ev.limit = Some(snd);
        ev.curves = curves;
        ev.psi = Some(comb);
        out.record(ev, fails);
    }
    out.classification = Some(class);
    Ok(out)
}

fn smooth_fiber_inclusion(c: &Campaign) -> Result<Outcome> {
    let f = c.inputs.poly()?;
    let x = c.inputs.point()?.ok_or_else(|| Error::PreconditionFailed("smooth-fiber-inclusion needs a point".into()))?;
    let fx = f.eval(&x)?;
    if !fx.is_zero() {
        return Err(Error::NotOnVariety(format!("F(x) = {fx}")));
    }
    let (solve, _) = linear_var(&f)
        .ok_or_else(|| Error::PreconditionFailed("curves through the point are drawn on a graph z_k = g(others)".into()))?;
    let fib = smooth_point_fiber(&f, &x, SecantOrientation::FirstMinusSecond)?;
    let grad: Vec<Scalar> = f.gradient().iter().map(|g| g.eval(&x)).collect::<Result<_>>()?;
    let mut second = Vec::new();
    for v in tangent_basis(&grad)? {
        let mut w = second_intrinsic_derivative(&f, &x, &v)?;
        w.extend(v.iter().flat_map(|vk| grad.iter().map(move |dj| -&(vk * dj))));
        second.push(w);
    }
    let q = linalg::rank(&second);
    let tol = &c.tolerances;
    let mut out = Outcome::default();
    let mut ev = Evidence::new(0, "dimension");
    ev.point = Some(x.clone());
    ev.detail = Some(format!(
        "span has projective dimension {} (vector dimension {}); {} independent second-derivative vectors",
        fib.subspace.dim(),
        fib.subspace.vector_dim(),
        q
    ));
    let fail = (fib.subspace.vector_dim() != 1 + q)
        .then(|| format!("vector dimension {} differs from 1 + {q}", fib.subspace.vector_dim()));
    out.record(ev, fail.into_iter().collect());

    let m = jacobian_module(&f)?;
    let double = double_gens(&m, Variant::B);
    let t0 = c.inputs.options.truncation.unwrap_or(DEFAULT_TRUNCATION);
    let bases: Vec<Coef> = (0..x.len()).filter(|&i| i != solve).map(|i| Coef::Value(x[i].clone())).collect();
    let col = (0..grad.len()).max_by(|&a, &b| grad[a].cmp_abs(&grad[b])).expect("nonempty gradient");
    let mut realized = Vec::new();
    for i in 0..c.sample_count() {
        let mut rng = sample_rng(c.seed, i as u64);
        let drawn = limit_with_redraws(&double, t0, &mut rng, |rng| {
            let fixed = rng.gen_bool(0.25);
            let free1: Vec<Reparam> =
                bases.iter().map(|b| if fixed { Reparam::constant(b.clone()) } else { draw::reparam(rng, b.clone(), 2, 3) }).collect();
            let free2: Vec<Reparam> = bases.iter().map(|b| draw::reparam(rng, b.clone(), 2, 3)).collect();
            let comb = draw::combination(rng, 2, &[col], 4);
            Ok((vec![PointCurve::graph(&f, free1)?, PointCurve::graph(&f, free2)?], comb))
        })?;
        let Some((curves, comb, l)) = drawn else {
            out.record(Evidence::new(1 + i, "sample"), vec![format!("every one of {REDRAWS} draws vanished identically")]);
            continue;
        };
        let dist = fib.subspace.distance(&l);
        let mut ev = Evidence::new(1 + i, "sample");
        ev.distance = Some(dist);
        let mut fails: Vec<String> = exceeds("distance to the span", dist, tol.membership).into_iter().collect();
        fails.extend(oracle_check(&double, &curves, &comb, &l, tol, &mut ev));
        ev.limit = Some(l.clone());
        ev.curves = curves;
        ev.psi = Some(comb);
        realized.push(l);
        out.record(ev, fails);
    }
    if !realized.is_empty() {
        let span = ProjSubspace::from_points(&realized)?;
        let equal = span.approx_eq(&fib.subspace, tol.membership);
        let mut ev = Evidence::new(1 + c.sample_count(), "realized-span");
        ev.distance = Some(if equal { 0.0 } else { 1.0 });
        ev.detail = Some(format!("limits span a P^{}; the span is a P^{}", span.dim(), fib.subspace.dim()));
        let fail = (!equal).then(|| "the sampled limits do not span the predicted subspace".to_string());
        out.record(ev, fail.into_iter().collect());
    }
    out.classification = Some(fib);
    Ok(out)
}
