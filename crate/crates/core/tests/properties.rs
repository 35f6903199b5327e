use num_rational::Rational64;
use proptest::prelude::*;

use doublefiber::curvefibers::derivative_ratio;
use doublefiber::moddouble::{eval_matrix, jacobian_module, CurveSampler};
use doublefiber::projan::{embed_first, embed_second, gamma_map, lambda_map, ProjPoint, ProjSubspace};
use doublefiber::symcore::poly::var_names;
use doublefiber::symcore::{parse_poly, parse_series, Poly, PuiseuxSeries, Scalar};

fn rational() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=5).prop_map(|(p, q)| Scalar::rational(p, q))
}

fn nonzero_rational() -> impl Strategy<Value = Scalar> {
    (1i64..=9, 1i64..=5, any::<bool>()).prop_map(|(p, q, neg)| Scalar::rational(if neg { -p } else { p }, q))
}

fn poly_xy() -> impl Strategy<Value = Poly> {
    prop::collection::vec((0u32..4, 0u32..4, rational()), 0..5)
        .prop_map(|terms| Poly::from_terms(&var_names(&["x", "y"]), terms.into_iter().map(|(a, b, c)| (vec![a, b], c))))
}

fn series() -> impl Strategy<Value = PuiseuxSeries> {
    prop::collection::vec((0u32..8, rational()), 0..4).prop_map(PuiseuxSeries::polynomial)
}

fn same(a: &Poly, b: &Poly) -> bool {
    a.sub(b).is_zero()
}

/// Coprime `(n, B1)` with `n < B1`.
fn branch() -> impl Strategy<Value = (u32, u32)> {
    (2u32..6, 1u32..10).prop_filter_map("coprime", |(n, k)| {
        let b1 = n + k;
        (num_integer::gcd(n, b1) == 1).then_some((n, b1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_ring_axioms(a in poly_xy(), b in poly_xy(), c in poly_xy()) {
        prop_assert!(same(&a.add(&b).add(&c), &a.add(&b.add(&c))));
        prop_assert!(same(&a.mul(&b), &b.mul(&a)));
        prop_assert!(same(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn series_ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert!(a.mul(&b).sub(&b.mul(&a)).is_zero_so_far());
        prop_assert!(a.mul(&b.add(&c)).sub(&a.mul(&b).add(&a.mul(&c))).is_zero_so_far());
        prop_assert!(a.mul(&b).mul(&c).sub(&a.mul(&b.mul(&c))).is_zero_so_far());
    }

    #[test]
    fn product_rule_and_chain_rule(f in poly_xy(), e1 in series(), e2 in series()) {
        let lhs = f.eval_series(&[e1.clone(), e2.clone()]).unwrap().derivative();
        let grad = f.gradient();
        let rhs = grad[0].eval_series(&[e1.clone(), e2.clone()]).unwrap().mul(&e1.derivative())
            .add(&grad[1].eval_series(&[e1.clone(), e2.clone()]).unwrap().mul(&e2.derivative()));
        prop_assert!(lhs.sub(&rhs).is_zero_so_far());
    }

    #[test]
    fn parse_print_roundtrip(p in poly_xy(), s in series()) {
        let vars = var_names(&["x", "y"]);
        let back = parse_poly(&p.to_string(), &vars).unwrap();
        prop_assert!(same(&back, &p), "{} -> {}", p, back);
        let sback = parse_series(&s.to_string()).unwrap();
        prop_assert!(sback.sub(&s).is_zero_so_far(), "{} -> {}", s, sback);
    }

    #[test]
    fn projective_scale_invariance(v in prop::collection::vec(rational(), 4), lambda in nonzero_rational()) {
        prop_assume!(v.iter().any(|s| !s.is_zero()));
        let p = ProjPoint::new(v.clone()).unwrap();
        let q = ProjPoint::new(v.iter().map(|s| s * &lambda).collect()).unwrap();
        prop_assert!(p.distance(&q) < 1e-12);
        prop_assert!(p.approx_eq(&q, 1e-12));
    }

    #[test]
    fn gamma_lambda_roundtrip_on_cusp(s1 in nonzero_rational(), s2 in nonzero_rational(), a in rational(), b in rational()) {
        prop_assume!(s1 != s2 && (!a.is_zero() || !b.is_zero()));
        let f = parse_poly("y^2 - x^3", &var_names(&["x", "y"])).unwrap();
        let m = jacobian_module(&f).unwrap();
        let sampler = CurveSampler::new(vec![parse_series("t^2").unwrap(), parse_series("t^3").unwrap()]);
        let x = sampler.point_at_root(&s1);
        let x2 = sampler.point_at_root(&s2);
        prop_assume!(x != x2);
        let row = |p: &[Scalar], c: &Scalar| -> Vec<Scalar> { eval_matrix(&m, p).unwrap()[0].iter().map(|e| e * c).collect() };
        let uu = ProjPoint::new(row(&x, &a).into_iter().chain(row(&x2, &b)).collect()).unwrap();
        let vw = gamma_map(&x, &x2, &uu).unwrap();
        prop_assert!(lambda_map(&x, &x2, &vw).unwrap().distance(&uu) < 1e-10);
    }

    #[test]
    fn join_dimension(k1 in 1usize..3, k2 in 1usize..3, seed in prop::collection::vec(rational(), 12)) {
        let a = ProjSubspace::span(3, &seed[..3 * k1].chunks(3).map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap();
        let b = ProjSubspace::span(3, &seed[6..6 + 3 * k2].chunks(3).map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap();
        let j = embed_first(&a).unwrap().join(&embed_second(&b).unwrap()).unwrap();
        prop_assert_eq!(j.dim(), a.dim() + b.dim() + 1);
    }

    #[test]
    fn conormal_ratio_identity((n, b1) in branch(), a in nonzero_rational()) {
        // f = y^n - a^n x^B1 vanishes on (t^n, a t^B1).
        let vars = var_names(&["x", "y"]);
        let an = a.pow(n);
        let f = Poly::from_terms(&vars, [(vec![0, n], Scalar::one()), (vec![b1, 0], -&an)]);
        let eta = vec![PuiseuxSeries::polynomial([(n, Scalar::one())]), PuiseuxSeries::polynomial([(b1, a.clone())])];
        let r = derivative_ratio(&eta[0], &eta[1], 24).unwrap();
        let fx = f.diff_index(0).eval_series(&eta).unwrap();
        let fy = f.diff_index(1).eval_series(&eta).unwrap();
        let res = fx.add(&fy.mul(&r)).truncate(Rational64::from_integer(24));
        prop_assert!(res.is_zero_so_far(), "{}", res);
    }
}
