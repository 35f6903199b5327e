//! Seeded point sources on curves, hypersurfaces and their products.

use num_complex::Complex64;
use num_integer::Integer;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::symcore::{Poly, PuiseuxSeries, Scalar};

pub trait PointSampler {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Vec<Scalar>>;
}

/// A small nonzero rational `p/q`.
pub fn random_rational(rng: &mut ChaCha8Rng) -> Scalar {
    let mut p = 0;
    while p == 0 {
        p = rng.gen_range(-12i64..=12);
    }
    Scalar::rational(p, rng.gen_range(1i64..=6))
}

/// Points `eta(t)` of a parametrized curve at random rational parameters.
#[derive(Clone, Debug)]
pub struct CurveSampler {
    eta: Vec<PuiseuxSeries>,
    ram: u32,
}

impl CurveSampler {
    pub fn new(eta: Vec<PuiseuxSeries>) -> Self {
        let ram = eta.iter().fold(1u32, |acc, s| acc.lcm(&s.ram()));
        CurveSampler { eta, ram }
    }

    /// `eta(s^ram)`, exact for exact coefficients; unknown tails are ignored.
    pub fn point_at_root(&self, s: &Scalar) -> Vec<Scalar> {
        self.eta
            .iter()
            .map(|comp| {
                let f = (self.ram / comp.ram()) as i64;
                comp.raw_terms().fold(Scalar::zero(), |acc, (q, c)| {
                    let k = q * f;
                    let p = if k >= 0 { s.pow(k as u32) } else { s.inv().expect("nonzero parameter").pow((-k) as u32) };
                    &acc + &(c * &p)
                })
            })
            .collect()
    }
}

impl PointSampler for CurveSampler {
    fn dim(&self) -> usize {
        self.eta.len()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Vec<Scalar>> {
        Ok(self.point_at_root(&random_rational(rng)))
    }
}

/// If `f = c * z_k + G(others)` with `c` a nonzero constant, returns `(k, c)`.
pub fn linear_var(f: &Poly) -> Option<(usize, Scalar)> {
    (0..f.nvars()).find_map(|k| {
        if f.degree_in(k) != 1 {
            return None;
        }
        let mut coef = None;
        for (e, c) in f.terms() {
            if e[k] == 1 {
                if e.iter().enumerate().any(|(i, &d)| i != k && d > 0) || coef.is_some() {
                    return None;
                }
                coef = Some(c.clone());
            }
        }
        coef.map(|c| (k, c))
    })
}

/// Points of `f = 0`: all coordinates but one are random rationals, the
/// last one solves the resulting equation (exactly when `f` is a graph over
/// it, numerically otherwise).
#[derive(Clone, Debug)]
pub struct HypersurfaceSampler {
    f: Poly,
    solve: usize,
    linear: Option<Scalar>,
}

impl HypersurfaceSampler {
    pub fn new(f: &Poly) -> Result<Self> {
        if f.is_constant() {
            return Err(Error::DegenerateInput("constant hypersurface".into()));
        }
        if let Some((k, c)) = linear_var(f) {
            return Ok(HypersurfaceSampler { f: f.clone(), solve: k, linear: Some(c) });
        }
        let k = (0..f.nvars()).max_by_key(|&i| (f.degree_in(i), std::cmp::Reverse(i))).expect("nonconstant");
        Ok(HypersurfaceSampler { f: f.clone(), solve: k, linear: None })
    }
}

impl PointSampler for HypersurfaceSampler {
    fn dim(&self) -> usize {
        self.f.nvars()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Vec<Scalar>> {
        let n = self.f.nvars();
        let mut pt: Vec<Scalar> = (0..n).map(|_| random_rational(rng)).collect();
        let k = self.solve;
        if let Some(c) = &self.linear {
            pt[k] = Scalar::zero();
            let g = self.f.eval(&pt)?;
            pt[k] = -(&g / c);
            return Ok(pt);
        }
        let d = self.f.degree_in(k) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
        for (e, c) in self.f.terms() {
            let mut m = c.to_c64();
            for (i, &p) in e.iter().enumerate() {
                if i != k {
                    m *= pt[i].to_c64().powu(p);
                }
            }
            coeffs[e[k] as usize] += m;
        }
        if coeffs[d].norm() == 0.0 {
            return Err(Error::SamplerExhausted(1));
        }
        let roots = poly_roots(&coeffs);
        let z = roots[rng.gen_range(0..roots.len())];
        pt[k] = Scalar::from_c64(z);
        Ok(pt)
    }
}

/// Pairs `(x, x')` drawn from two samplers, rejecting diagonal pairs.
pub struct PairSampler<'a> {
    pub first: &'a dyn PointSampler,
    pub second: &'a dyn PointSampler,
}

impl PointSampler for PairSampler<'_> {
    fn dim(&self) -> usize {
        self.first.dim() + self.second.dim()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Vec<Scalar>> {
        for _ in 0..64 {
            let a = self.first.sample(rng)?;
            let b = self.second.sample(rng)?;
            if !super::same_point(&a, &b) {
                return Ok(a.into_iter().chain(b).collect());
            }
        }
        Err(Error::SamplerExhausted(64))
    }
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of `sum c_i z^i` (Aberth iteration, then Newton polish).
pub fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let mut c = c.to_vec();
    while c.len() > 1 && c.last().is_some_and(|a| a.norm() == 0.0) {
        c.pop();
    }
    let d = c.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = c[d];
    let radius = 1.0 + c[..d].iter().map(|a| (a / lead).norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..d).map(|k| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..d).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_poly;
    use crate::symcore::poly::var_names;
    use rand::SeedableRng;

    #[test]
    fn roots_of_cubic() {
        // (z-1)(z-2)(z+3) = z^3 - 7z + 6
        let c = [6.0, -7.0, 0.0, 1.0].map(|x| Complex64::new(x, 0.0));
        let mut r: Vec<f64> = poly_roots(&c).iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn hypersurface_points_lie_on_it() {
        let xyz = var_names(&["x", "y", "z"]);
        let f = parse_poly("x^2 + y^3 + z^4", &xyz).unwrap();
        let s = HypersurfaceSampler::new(&f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let p = s.sample(&mut rng).unwrap();
            let scale: f64 = p.iter().map(|x| x.abs()).fold(1.0, f64::max).powi(4);
            assert!(f.eval(&p).unwrap().abs() < 1e-10 * scale);
        }
        let g = parse_poly("z - x^2 - y^2", &xyz).unwrap();
        assert_eq!(linear_var(&g).map(|(k, _)| k), Some(2));
        let p = HypersurfaceSampler::new(&g).unwrap().sample(&mut rng).unwrap();
        assert!(g.eval(&p).unwrap().is_exact_zero());
    }
}
