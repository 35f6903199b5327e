//! Point maps between fibers of the double and of `2M` over off-diagonal
//! pairs, the `2M ~ M_Dhat` identification, and membership in `U(M)`.

use super::space::{ProjPoint, ProjSubspace, TAU_PROJ};
use crate::error::{Error, Result};
use crate::linalg;
use crate::moddouble::{eval_matrix, same_point, ModuleGens};
use crate::symcore::Scalar;

fn secant(x: &[Scalar], x2: &[Scalar]) -> Result<Vec<Scalar>> {
    if x.len() != x2.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: x2.len() });
    }
    if same_point(x, x2) {
        return Err(Error::DiagonalPoint);
    }
    Ok(x.iter().zip(x2).map(|(a, b)| a - b).collect())
}

fn is_admissible(d: &Scalar, scale: f64) -> bool {
    if d.is_exact() {
        !d.is_exact_zero()
    } else {
        d.abs() > 1e-12 * scale
    }
}

/// `[u, u'] -> [u + u', (x_1 - x'_1) u', ..., (x_n - x'_n) u']`.
pub fn gamma_map(x: &[Scalar], x2: &[Scalar], uu: &ProjPoint) -> Result<ProjPoint> {
    let d = secant(x, x2)?;
    if !uu.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch { expected: uu.len() + 1, got: uu.len() });
    }
    let r = uu.len() / 2;
    let (u, u2) = uu.coords().split_at(r);
    let mut out: Vec<Scalar> = u.iter().zip(u2).map(|(a, b)| a + b).collect();
    for di in &d {
        out.extend(u2.iter().map(|b| di * b));
    }
    ProjPoint::new(out)
}

fn blocks(vw: &ProjPoint, n: usize) -> Result<(usize, Vec<&[Scalar]>)> {
    if !vw.len().is_multiple_of(n + 1) {
        return Err(Error::DimensionMismatch { expected: (vw.len() / (n + 1) + 1) * (n + 1), got: vw.len() });
    }
    let r = vw.len() / (n + 1);
    Ok((r, vw.coords().chunks(r).collect()))
}

/// `[(x_i - x'_i) v - w_i, w_i]` for a chosen block index `i`.
pub fn lambda_map_with_index(x: &[Scalar], x2: &[Scalar], vw: &ProjPoint, i: usize) -> Result<ProjPoint> {
    let d = secant(x, x2)?;
    let (_, b) = blocks(vw, d.len())?;
    let scale = d.iter().map(Scalar::abs).fold(0.0, f64::max);
    if i >= d.len() || !is_admissible(&d[i], scale) {
        return Err(Error::DegenerateInput(format!("block index {i} has x_i = x'_i")));
    }
    let wi = b[i + 1];
    let mut out: Vec<Scalar> = b[0].iter().zip(wi).map(|(v, w)| &(&d[i] * v) - w).collect();
    out.extend(wi.iter().cloned());
    ProjPoint::new(out)
}

/// Residual of the relations `(x_i - x'_i) w_j = (x_j - x'_j) w_i` over all
/// block pairs, relative to the size of the input.
pub fn block_relation_residual(x: &[Scalar], x2: &[Scalar], vw: &ProjPoint) -> Result<f64> {
    let d = secant(x, x2)?;
    let (_, b) = blocks(vw, d.len())?;
    let dc: Vec<_> = d.iter().map(Scalar::to_c64).collect();
    let w: Vec<Vec<_>> = b[1..].iter().map(|blk| linalg::to_c64(blk)).collect();
    let vnorm = linalg::norm(&vw.to_c64());
    let dnorm = linalg::norm(&dc);
    let mut worst: f64 = 0.0;
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let diff: Vec<_> = w[j].iter().zip(&w[i]).map(|(a, b)| dc[i] * a - dc[j] * b).collect();
            worst = worst.max(linalg::norm(&diff) / (vnorm * dnorm));
        }
    }
    Ok(worst)
}

/// `Lambda`, computed with the index maximizing `|x_i - x'_i|`. Every other
/// admissible index must give the same point within `TAU_PROJ`, and
/// inadmissible blocks must vanish.
pub fn lambda_map(x: &[Scalar], x2: &[Scalar], vw: &ProjPoint) -> Result<ProjPoint> {
    let d = secant(x, x2)?;
    let (_, b) = blocks(vw, d.len())?;
    let scale = d.iter().map(Scalar::abs).fold(0.0, f64::max);
    let best = (0..d.len()).max_by(|&a, &c| d[a].abs().total_cmp(&d[c].abs())).expect("n >= 1");
    let p = lambda_map_with_index(x, x2, vw, best)?;
    let vnorm = linalg::norm(&vw.to_c64());
    for j in 0..d.len() {
        if j == best {
            continue;
        }
        if is_admissible(&d[j], scale) {
            let q = lambda_map_with_index(x, x2, vw, j)?;
            if !p.approx_eq(&q, TAU_PROJ) {
                return Err(Error::InconsistentBlocks(format!("indices {best} and {j} give {p} and {q}")));
            }
        } else if linalg::norm(&linalg::to_c64(b[j + 1])) > TAU_PROJ * vnorm {
            return Err(Error::InconsistentBlocks(format!("x_{j} = x'_{j} but w_{j} is nonzero")));
        }
    }
    Ok(p)
}

/// `[u, u'] -> [u + u', u']`, the fiberwise identification `2M ~ M_Dhat`.
pub fn dhat_from_two_m(uu: &ProjPoint) -> Result<ProjPoint> {
    let r = half(uu)?;
    let (u, u2) = uu.coords().split_at(r);
    let mut out: Vec<Scalar> = u.iter().zip(u2).map(|(a, b)| a + b).collect();
    out.extend(u2.iter().cloned());
    ProjPoint::new(out)
}

pub fn two_m_from_dhat(vw: &ProjPoint) -> Result<ProjPoint> {
    let r = half(vw)?;
    let (v, w) = vw.coords().split_at(r);
    let mut out: Vec<Scalar> = v.iter().zip(w).map(|(a, b)| a - b).collect();
    out.extend(w.iter().cloned());
    ProjPoint::new(out)
}

fn half(p: &ProjPoint) -> Result<usize> {
    if !p.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch { expected: p.len() + 1, got: p.len() });
    }
    Ok(p.len() / 2)
}

/// `P(row [M(x)])`, the fiber of `Projan R(M)` over a point of `U(M)`.
pub fn row_space(m: &ModuleGens, x: &[Scalar]) -> Result<ProjSubspace> {
    ProjSubspace::span(m.r(), &eval_matrix(m, x)?)
}

/// `rank M(x) = k` and `l` lies on the row space. Needs the cached generic
/// rank `k`.
pub fn u_membership(m: &ModuleGens, x: &[Scalar], l: &ProjPoint) -> Result<bool> {
    let k = m.cached_rank().ok_or_else(|| Error::PreconditionFailed("generic rank of M not computed".into()))?;
    if l.len() != m.r() {
        return Err(Error::DimensionMismatch { expected: m.r(), got: l.len() });
    }
    let mx = eval_matrix(m, x)?;
    if linalg::rank(&mx) != k {
        return Ok(false);
    }
    Ok(ProjSubspace::span(m.r(), &mx)?.contains(l, TAU_PROJ))
}

/// `A` placed as `[u, 0]` in the doubled space.
pub fn embed_first(a: &ProjSubspace) -> Result<ProjSubspace> {
    a.embed(2 * a.ambient(), 0)
}

/// `B` placed as `[0, u']` in the doubled space.
pub fn embed_second(b: &ProjSubspace) -> Result<ProjSubspace> {
    b.embed(2 * b.ambient(), b.ambient())
}
