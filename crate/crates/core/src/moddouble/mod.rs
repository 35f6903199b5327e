//! Generator matrices for a module `M`, its double `M_D` and the related
//! modules on `X x X`, with pointwise evaluation, generic rank and the
//! singular-locus test.

mod sampler;

pub use sampler::{linear_var, poly_roots, random_rational, CurveSampler, HypersurfaceSampler, PairSampler, PointSampler};

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::symcore::poly::doubled_vars;
use crate::symcore::{Poly, Scalar};

/// Default number of sample points for [`generic_rank`].
pub const GENERIC_SAMPLES: usize = 25;

/// A `p x r` matrix of polynomials whose columns generate a module.
#[derive(Clone, Debug)]
pub struct ModuleGens {
    vars: Vec<String>,
    gens: Vec<Vec<Poly>>,
    rank: OnceLock<usize>,
}

impl ModuleGens {
    /// `gens` is given row by row. Panics on a ragged or empty matrix.
    pub fn new(vars: &[String], gens: Vec<Vec<Poly>>) -> Self {
        assert!(!gens.is_empty() && !gens[0].is_empty(), "generator matrix must be nonempty");
        let r = gens[0].len();
        assert!(gens.iter().all(|row| row.len() == r), "ragged generator matrix");
        ModuleGens { vars: vars.to_vec(), gens, rank: OnceLock::new() }
    }

    pub fn p(&self) -> usize {
        self.gens.len()
    }

    pub fn r(&self) -> usize {
        self.gens[0].len()
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[Vec<Poly>] {
        &self.gens
    }

    /// Generic rank if it has been computed.
    pub fn cached_rank(&self) -> Option<usize> {
        self.rank.get().copied()
    }
}

/// The jacobian module of `f`: one row, the partial derivatives of `f`.
pub fn jacobian_module(f: &Poly) -> Result<ModuleGens> {
    if f.is_constant() {
        return Err(Error::DegenerateInput("jacobian module of a constant".into()));
    }
    Ok(ModuleGens::new(f.vars(), vec![f.gradient()]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// `(h_j)_D` and `(0, (z_i - z'_i) h_j(z'))`.
    B,
    /// `(h_j)_D` and `((z_i - z'_i) h_j(z), 0)`.
    BPrime,
    /// `(h_j)_D` and `(z_i h_j)_D`.
    BDoublePrime,
    /// `pi_1^* M + pi_2^* M`.
    TwoM,
    /// `(h_j)_D` only.
    DMinus,
    /// `(h_j)_D` and `(0, h_j(z'))`.
    DHat,
    /// `(0, (z_i - z'_i) h_j(z'))` only.
    JiDelta,
}

impl Variant {
    pub const ALL: [Variant; 7] =
        [Variant::B, Variant::BPrime, Variant::BDoublePrime, Variant::TwoM, Variant::DMinus, Variant::DHat, Variant::JiDelta];

    pub fn label(self) -> &'static str {
        match self {
            Variant::B => "B",
            Variant::BPrime => "Bp",
            Variant::BDoublePrime => "Bpp",
            Variant::TwoM => "2M",
            Variant::DMinus => "Dminus",
            Variant::DHat => "Dhat",
            Variant::JiDelta => "JIdelta",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::DegenerateInput(format!("unknown variant `{s}` (expected B|Bp|Bpp|2M|Dminus|Dhat|JIdelta)")))
    }
}

/// A generator matrix on `X x X`, over variables `z_1..z_n, z'_1..z'_n`.
#[derive(Clone, Debug)]
pub struct DoubleGens {
    base: ModuleGens,
    variant: Variant,
    vars: Vec<String>,
    matrix: Vec<Vec<Poly>>,
    rank: OnceLock<usize>,
}

impl DoubleGens {
    pub fn base(&self) -> &ModuleGens {
        &self.base
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[Vec<Poly>] {
        &self.matrix
    }

    pub fn ncols(&self) -> usize {
        self.matrix[0].len()
    }

    /// Column of `(0, (z_block - z'_block) h_gen(z'))` in the `B` layout,
    /// or of `(h_gen)_D` for `block = None`.
    pub fn b_col(&self, block: Option<usize>, gen: usize) -> usize {
        let r = self.base.r();
        match block {
            None => gen,
            Some(k) => (k + 1) * r + gen,
        }
    }

    pub fn column(&self, c: usize) -> Vec<Poly> {
        self.matrix.iter().map(|row| row[c].clone()).collect()
    }

    pub fn cached_rank(&self) -> Option<usize> {
        self.rank.get().copied()
    }
}

/// Builds the generator matrix of the requested variant. Rows `0..p`
/// carry the first factor, rows `p..2p` the second.
pub fn double_gens(m: &ModuleGens, variant: Variant) -> DoubleGens {
    let n = m.n();
    let (p, r) = (m.p(), m.r());
    let vars = doubled_vars(m.vars());
    let first: Vec<usize> = (0..n).collect();
    let second: Vec<usize> = (n..2 * n).collect();
    let w: Vec<Vec<Poly>> = m.rows().iter().map(|row| row.iter().map(|g| g.embed(&vars, &first)).collect()).collect();
    let w2: Vec<Vec<Poly>> = m.rows().iter().map(|row| row.iter().map(|g| g.embed(&vars, &second)).collect()).collect();
    let zero = Poly::zero(&vars);
    let zvar = |i: usize| Poly::var(&vars, &vars[i]).expect("own variable");
    let secant: Vec<Poly> = (0..n).map(|i| zvar(i).sub(&zvar(n + i))).collect();

    let mut cols: Vec<Vec<Poly>> = Vec::new();
    let double_col = |j: usize| -> Vec<Poly> { (0..p).map(|i| w[i][j].clone()).chain((0..p).map(|i| w2[i][j].clone())).collect() };
    let push_doubles = |cols: &mut Vec<Vec<Poly>>| {
        for j in 0..r {
            cols.push(double_col(j));
        }
    };
    let lower_secants = |cols: &mut Vec<Vec<Poly>>| {
        for s in &secant {
            for j in 0..r {
                cols.push((0..p).map(|_| zero.clone()).chain((0..p).map(|i| s.mul(&w2[i][j]))).collect());
            }
        }
    };
    match variant {
        Variant::B => {
            push_doubles(&mut cols);
            lower_secants(&mut cols);
        }
        Variant::BPrime => {
            push_doubles(&mut cols);
            for s in &secant {
                for j in 0..r {
                    cols.push((0..p).map(|i| s.mul(&w[i][j])).chain((0..p).map(|_| zero.clone())).collect());
                }
            }
        }
        Variant::BDoublePrime => {
            push_doubles(&mut cols);
            for k in 0..n {
                for j in 0..r {
                    cols.push(
                        (0..p).map(|i| zvar(k).mul(&w[i][j])).chain((0..p).map(|i| zvar(n + k).mul(&w2[i][j]))).collect(),
                    );
                }
            }
        }
        Variant::TwoM => {
            for j in 0..r {
                cols.push((0..p).map(|i| w[i][j].clone()).chain((0..p).map(|_| zero.clone())).collect());
            }
            for j in 0..r {
                cols.push((0..p).map(|_| zero.clone()).chain((0..p).map(|i| w2[i][j].clone())).collect());
            }
        }
        Variant::DMinus => push_doubles(&mut cols),
        Variant::DHat => {
            push_doubles(&mut cols);
            for j in 0..r {
                cols.push((0..p).map(|_| zero.clone()).chain((0..p).map(|i| w2[i][j].clone())).collect());
            }
        }
        Variant::JiDelta => lower_secants(&mut cols),
    }
    let matrix: Vec<Vec<Poly>> = (0..2 * p).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    DoubleGens { base: m.clone(), variant, vars, matrix, rank: OnceLock::new() }
}

/// Anything that is a matrix of polynomials with a cached generic rank.
pub trait GenMatrix {
    fn vars(&self) -> &[String];
    fn rows(&self) -> &[Vec<Poly>];
    fn rank_cell(&self) -> &OnceLock<usize>;
}

impl GenMatrix for ModuleGens {
    fn vars(&self) -> &[String] {
        &self.vars
    }
    fn rows(&self) -> &[Vec<Poly>] {
        &self.gens
    }
    fn rank_cell(&self) -> &OnceLock<usize> {
        &self.rank
    }
}

impl GenMatrix for DoubleGens {
    fn vars(&self) -> &[String] {
        &self.vars
    }
    fn rows(&self) -> &[Vec<Poly>] {
        &self.matrix
    }
    fn rank_cell(&self) -> &OnceLock<usize> {
        &self.rank
    }
}

/// Entrywise evaluation at a point.
pub fn eval_matrix<G: GenMatrix + ?Sized>(g: &G, point: &[Scalar]) -> Result<Matrix> {
    if point.len() != g.vars().len() {
        return Err(Error::DimensionMismatch { expected: g.vars().len(), got: point.len() });
    }
    g.rows().iter().map(|row| row.iter().map(|e| e.eval(point)).collect()).collect()
}

pub fn eval_matrix_c64<G: GenMatrix + ?Sized>(g: &G, point: &[Complex64]) -> Vec<Vec<Complex64>> {
    g.rows().iter().map(|row| row.iter().map(|e| e.eval_c64(point)).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub samples: usize,
    /// How many samples reached the maximal rank.
    pub top_count: usize,
}

/// Generic rank as the maximum rank over `samples` seeded points. The
/// result is cached on first success.
pub fn generic_rank<G: GenMatrix + ?Sized>(
    g: &G,
    sampler: &dyn PointSampler,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<RankReport> {
    let mut ranks = Vec::with_capacity(samples);
    for _ in 0..samples {
        let pt = sampler.sample(rng)?;
        ranks.push(linalg::rank(&eval_matrix(g, &pt)?));
    }
    let rank = ranks.iter().copied().max().unwrap_or(0);
    let top_count = ranks.iter().filter(|&&k| k == rank).count();
    let _ = g.rank_cell().set(rank);
    Ok(RankReport { rank: *g.rank_cell().get().expect("just set"), samples, top_count })
}

/// Rank of the evaluated matrix at one point.
pub fn rank_at<G: GenMatrix + ?Sized>(g: &G, point: &[Scalar]) -> Result<usize> {
    Ok(linalg::rank(&eval_matrix(g, point)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaTest {
    pub in_sigma: bool,
    pub predicted: bool,
}

/// Points agree exactly, or (for floats) to within `1e-12` relative.
pub fn same_point(x: &[Scalar], y: &[Scalar]) -> bool {
    x.iter().zip(y).all(|(a, b)| {
        let d = a - b;
        if d.is_exact() {
            d.is_exact_zero()
        } else {
            d.abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
        }
    })
}

/// Compares `rank M_D(x, x') < 2k` against the predicted singular set
/// `diagonal u (X x Sigma) u (Sigma x X)`. Both generic ranks must already
/// be cached.
pub fn singular_locus_test(m: &ModuleGens, d: &DoubleGens, x: &[Scalar], x2: &[Scalar]) -> Result<SigmaTest> {
    let k = m.cached_rank().ok_or_else(|| Error::PreconditionFailed("generic rank of M not computed".into()))?;
    if d.cached_rank().is_none() {
        return Err(Error::PreconditionFailed("generic rank of the double not computed".into()));
    }
    let pt: Vec<Scalar> = x.iter().chain(x2).cloned().collect();
    let in_sigma = rank_at(d, &pt)? < 2 * k;
    let predicted = same_point(x, x2) || rank_at(m, x)? < k || rank_at(m, x2)? < k;
    Ok(SigmaTest { in_sigma, predicted })
}

/// Symbolic residuals of the identities expressing the `B''` and `B'`
/// columns through `B` columns:
/// `(z_i h_j)_D = z_i (h_j)_D - (0, (z_i - z'_i) h_j(z'))` and
/// `((z_i - z'_i) h_j(z), 0) = (z_i - z'_i)(h_j)_D - (0, (z_i - z'_i) h_j(z'))`.
/// Every returned column is identically zero when the identities hold.
pub fn generator_identity_residuals(m: &ModuleGens) -> Vec<(String, Vec<Poly>)> {
    let b = double_gens(m, Variant::B);
    let bp = double_gens(m, Variant::BPrime);
    let bpp = double_gens(m, Variant::BDoublePrime);
    let vars = b.vars().to_vec();
    let n = m.n();
    let mut out = Vec::new();
    for i in 0..n {
        let zi = Poly::var(&vars, &vars[i]).expect("own variable");
        let zi2 = Poly::var(&vars, &vars[n + i]).expect("own variable");
        let sec = zi.sub(&zi2);
        for j in 0..m.r() {
            let dj = b.column(b.b_col(None, j));
            let sj = b.column(b.b_col(Some(i), j));
            let target = bpp.column(bpp.b_col(Some(i), j));
            let res: Vec<Poly> = target.iter().zip(&dj).zip(&sj).map(|((t, d), s)| t.sub(&zi.mul(d).sub(s))).collect();
            out.push((format!("({}*h{})_D", vars[i], j + 1), res));
            let target = bp.column(bp.b_col(Some(i), j));
            let res: Vec<Poly> = target.iter().zip(&dj).zip(&sj).map(|((t, d), s)| t.sub(&sec.mul(d).sub(s))).collect();
            out.push((format!("(({}-{})*h{}, 0)", vars[i], vars[n + i], j + 1), res));
        }
    }
    out
}

/// Largest residual of either column span projected onto the other.
/// Zero (up to rounding) when the evaluated matrices generate the same
/// subspace of the stalk.
pub fn column_span_distance(a: &Matrix, b: &Matrix) -> f64 {
    if linalg::is_exact(a) && linalg::is_exact(b) {
        let cols = |m: &Matrix| -> Matrix { (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect() };
        let (ca, cb) = (cols(a), cols(b));
        let ra = linalg::rref_exact(&ca).len();
        let rb = linalg::rref_exact(&cb).len();
        let both: Matrix = ca.into_iter().chain(cb).collect();
        let rab = linalg::rref_exact(&both).len();
        return if ra == rab && rb == rab { 0.0 } else { 1.0 };
    }
    // Scaling stalk coordinates by the same factors for both matrices, and
    // each column by its norm, leaves the comparison unchanged and keeps
    // entries of very different size from hiding a direction below the
    // rank cutoff. Entries that are rounding noise are zeroed first.
    let row_scale: Vec<f64> = (0..a.len())
        .map(|i| {
            let m = a[i].iter().chain(&b[i]).map(|s| s.to_c64().norm()).fold(0.0, f64::max);
            if m > 0.0 { 1.0 / m } else { 1.0 }
        })
        .collect();
    let cols = |m: &Matrix| -> Vec<Vec<Complex64>> {
        (0..m[0].len())
            .map(|j| {
                let v: Vec<Complex64> = m
                    .iter()
                    .zip(&row_scale)
                    .map(|(r, s)| if r[j].is_zero() { Complex64::new(0.0, 0.0) } else { r[j].to_c64() * s })
                    .collect();
                let n = linalg::norm(&v);
                if n > 0.0 { v.into_iter().map(|z| z / n).collect() } else { v }
            })
            .collect()
    };
    let (ca, cb) = (cols(a), cols(b));
    let dim = a.len();
    let ba = linalg::orthonormal_basis(&ca, dim);
    let bb = linalg::orthonormal_basis(&cb, dim);
    let one_way = |basis: &[Vec<Complex64>], other: &[Vec<Complex64>]| -> f64 {
        other.iter().map(|v| linalg::residual(basis, v)).fold(0.0, f64::max)
    };
    let d = one_way(&ba, &bb).max(one_way(&bb, &ba));
    if ba.len() != bb.len() {
        d.max(1.0)
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_poly;
    use crate::symcore::poly::var_names;

    fn cusp() -> Poly {
        parse_poly("y^2 - x^3", &var_names(&["x", "y"])).unwrap()
    }

    #[test]
    fn jacobian_modules() {
        let m = jacobian_module(&cusp()).unwrap();
        assert_eq!(m.rows()[0][0].to_string(), "-3*x^2");
        assert_eq!(m.rows()[0][1].to_string(), "2*y");
        let xyz = var_names(&["x", "y", "z"]);
        let m = jacobian_module(&parse_poly("x^2 + y^3 + z^4", &xyz).unwrap()).unwrap();
        let s: Vec<String> = m.rows()[0].iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["2*x", "3*y^2", "4*z^3"]);
        assert!(matches!(jacobian_module(&parse_poly("7", &xyz).unwrap()), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn smallest_double() {
        let x = var_names(&["x"]);
        let m = ModuleGens::new(&x, vec![vec![parse_poly("2*x", &x).unwrap()]]);
        let d = double_gens(&m, Variant::B);
        let s: Vec<Vec<String>> = d.rows().iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect();
        assert_eq!(s, [vec!["2*x", "0"], vec!["2*x'", "2*x*x' - 2*x'^2"]]);
    }

    #[test]
    fn block_layouts() {
        let m = jacobian_module(&cusp()).unwrap();
        let d = double_gens(&m, Variant::TwoM);
        let s: Vec<Vec<String>> = d.rows().iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect();
        assert_eq!(s, [vec!["-3*x^2", "2*y", "0", "0"], vec!["0", "0", "-3*x'^2", "2*y'"]]);
        let d = double_gens(&m, Variant::BDoublePrime);
        let c = d.column(d.b_col(Some(0), 0));
        assert_eq!(c[0].to_string(), "-3*x^3");
        assert_eq!(c[1].to_string(), "-3*x'^3");
        assert_eq!(double_gens(&m, Variant::B).ncols(), 6);
        assert_eq!(double_gens(&m, Variant::DMinus).ncols(), 2);
    }

    #[test]
    fn evaluation() {
        let m = jacobian_module(&cusp()).unwrap();
        let one = Scalar::one;
        assert_eq!(eval_matrix(&m, &[one(), one()]).unwrap(), vec![vec![Scalar::from_int(-3), Scalar::from_int(2)]]);
        let d = double_gens(&m, Variant::B);
        let z = Scalar::zero;
        let e = eval_matrix(&d, &[one(), one(), z(), z()]).unwrap();
        let ints = |v: &[i64]| v.iter().map(|&k| Scalar::from_int(k)).collect::<Vec<_>>();
        assert_eq!(e, vec![ints(&[-3, 2, 0, 0, 0, 0]), ints(&[0, 0, 0, 0, 0, 0])]);
        let e = eval_matrix(&d, &[one(), one(), one(), one()]).unwrap();
        assert!(e[1][2..].iter().all(Scalar::is_exact_zero));
        assert!(matches!(eval_matrix(&d, &[one()]), Err(Error::DimensionMismatch { expected: 4, got: 1 })));
    }

    #[test]
    fn identities_hold() {
        let m = jacobian_module(&cusp()).unwrap();
        for (_, res) in generator_identity_residuals(&m) {
            assert!(res.iter().all(Poly::is_zero));
        }
    }

    #[test]
    fn variant_names() {
        for v in Variant::ALL {
            assert_eq!(v.label().parse::<Variant>().unwrap(), v);
        }
        assert!("C".parse::<Variant>().is_err());
    }
}
