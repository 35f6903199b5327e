//! Random curve reparametrizations and row combinations.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::moddouble::random_rational;
use crate::projan::{Coef, Combination, Reparam};
use crate::symcore::{PuiseuxSeries, Scalar};

pub(super) fn coef(rng: &mut ChaCha8Rng) -> Coef {
    Coef::Value(random_rational(rng))
}

/// `base + sum c_e t^e` with `1..=max_terms` distinct exponents in `1..=max_exp`.
pub(super) fn reparam(rng: &mut ChaCha8Rng, base: Coef, max_terms: usize, max_exp: u32) -> Reparam {
    let mut exps: Vec<u32> = (1..=max_exp).collect();
    exps.shuffle(rng);
    let k = rng.gen_range(1..=max_terms.min(exps.len()));
    let mut picked: Vec<u32> = exps[..k].to_vec();
    picked.sort_unstable();
    Reparam::at(base, picked.into_iter().map(|e| (e, coef(rng))).collect())
}

/// A leading coefficient: a rational, a symbolic root of unity of one of
/// `orders`, or a float of modulus one.
pub(super) fn leading(rng: &mut ChaCha8Rng, orders: &[u32]) -> Coef {
    match rng.gen_range(0..4) {
        0 => coef(rng),
        1 => {
            let o = *orders.choose(rng).expect("orders nonempty");
            Coef::Root { order: o, index: rng.gen_range(0..o) }
        }
        2 => {
            let th = rng.gen::<f64>() * TAU;
            Coef::Value(Scalar::float(th.cos(), th.sin()))
        }
        _ => Coef::int(*[1, -1, 2, -2].choose(rng).expect("nonempty")),
    }
}

/// Two reparametrizations at the origin. The second often shares the
/// leading exponent of the first, with a root of unity in front.
pub(super) fn origin_pair(rng: &mut ChaCha8Rng, orders: &[u32]) -> (Reparam, Reparam) {
    let zero = Coef::int(0);
    let s = rng.gen_range(1..=3u32);
    let phi1 = match rng.gen_range(0..4) {
        0 | 1 => Reparam::identity(),
        2 => Reparam::monomial(Coef::int(1), s),
        _ => reparam(rng, zero.clone(), 3, 4),
    };
    let lead = phi1.terms.first().map_or(1, |(e, _)| *e);
    let mut phi2 = if rng.gen_bool(0.6) {
        let c = leading(rng, orders);
        let r = rng.gen_range(lead + 1..=lead + 12);
        Reparam::at(zero, vec![(lead, c), (r, coef(rng))])
    } else {
        reparam(rng, zero, 3, 4)
    };
    if phi2 == phi1 {
        phi2.terms.push((13, coef(rng)));
    }
    (phi1, phi2)
}

/// A row combination for a matrix with `rows` rows.
pub(super) fn combination(rng: &mut ChaCha8Rng, rows: usize, cols: &[usize], max_m: u32) -> Combination {
    match rng.gen_range(0..10) {
        0..=5 => Combination::Balanced {
            a: if rng.gen_bool(0.2) { Scalar::zero() } else { random_rational(rng) },
            b: random_rational(rng),
            m: rng.gen_range(0..=max_m),
            col: *cols.choose(rng).expect("columns nonempty"),
        },
        6 | 7 => {
            let mut c: Vec<Scalar> = (0..rows).map(|_| if rng.gen_bool(0.25) { Scalar::zero() } else { random_rational(rng) }).collect();
            if c.iter().all(Scalar::is_zero) {
                c[0] = Scalar::one();
            }
            Combination::Constant(c)
        }
        _ => Combination::Series(
            (0..rows)
                .map(|_| {
                    let k = rng.gen_range(1..=2);
                    PuiseuxSeries::polynomial((0..k).map(|_| (rng.gen_range(0..=4u32), random_rational(rng))))
                })
                .collect(),
        ),
    }
}
