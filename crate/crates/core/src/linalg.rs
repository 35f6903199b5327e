//! Rank, row reduction and orthonormal bases for small scalar matrices.
//!
//! Exact matrices are reduced by Gaussian elimination over the Gaussian
//! rationals; anything containing a float goes through an SVD.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::symcore::Scalar;

/// Relative singular-value cutoff for numerical rank.
pub const TAU_RANK: f64 = 1e-8;

pub type Matrix = Vec<Vec<Scalar>>;

pub fn is_exact(m: &[Vec<Scalar>]) -> bool {
    m.iter().all(|row| row.iter().all(Scalar::is_exact))
}

pub fn to_c64(v: &[Scalar]) -> Vec<Complex64> {
    v.iter().map(Scalar::to_c64).collect()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `<a, b> = sum conj(a_i) b_i`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Reduced row echelon form of an exact matrix; zero rows are dropped.
pub fn rref_exact(m: &[Vec<Scalar>]) -> Matrix {
    let mut rows: Matrix = m.to_vec();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut lead = 0;
    for col in 0..ncols {
        let Some(p) = (lead..rows.len()).find(|&r| !rows[r][col].is_exact_zero()) else {
            continue;
        };
        rows.swap(lead, p);
        let inv = rows[lead][col].inv().expect("nonzero pivot");
        rows[lead] = rows[lead].iter().map(|x| x * &inv).collect();
        for r in 0..rows.len() {
            if r != lead && !rows[r][col].is_exact_zero() {
                let f = rows[r][col].clone();
                let pivot = rows[lead].clone();
                rows[r] = rows[r].iter().zip(&pivot).map(|(a, b)| a - &(&f * b)).collect();
            }
        }
        lead += 1;
        if lead == rows.len() {
            break;
        }
    }
    rows.truncate(lead);
    rows
}

fn to_dmatrix(m: &[Vec<Complex64>], ncols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.len(), ncols, |i, j| m[i][j])
}

pub fn singular_values(m: &[Vec<Complex64>]) -> Vec<f64> {
    let ncols = m.first().map_or(0, Vec::len);
    if m.is_empty() || ncols == 0 {
        return Vec::new();
    }
    let d = to_dmatrix(m, ncols);
    let mut s: Vec<f64> = d.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Number of singular values above `TAU_RANK * sigma_max`.
pub fn numerical_rank(m: &[Vec<Complex64>]) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > TAU_RANK * smax).count(),
        _ => 0,
    }
}

/// Rank: exact when every entry is exact, numerical otherwise.
pub fn rank(m: &[Vec<Scalar>]) -> usize {
    if is_exact(m) {
        rref_exact(m).len()
    } else {
        numerical_rank(&m.iter().map(|r| to_c64(r)).collect::<Vec<_>>())
    }
}

/// Orthonormal basis of the span of `vectors` (all of length `dim`),
/// dropping directions with singular value below `TAU_RANK * sigma_max`.
pub fn orthonormal_basis(vectors: &[Vec<Complex64>], dim: usize) -> Vec<Vec<Complex64>> {
    if vectors.is_empty() || dim == 0 {
        return Vec::new();
    }
    // columns are the input vectors
    let a = DMatrix::from_fn(dim, vectors.len(), |i, j| vectors[j][i]);
    let svd = a.svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Vec::new();
    }
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > TAU_RANK * smax)
        .map(|(k, _)| u.column(k).iter().copied().collect())
        .collect()
}

/// `|v - P v| / |v|` for the orthogonal projection `P` onto the span of
/// the orthonormal `basis`. Returns 0 for the zero vector.
pub fn residual(basis: &[Vec<Complex64>], v: &[Complex64]) -> f64 {
    let nv = norm(v);
    if nv == 0.0 {
        return 0.0;
    }
    let mut r: Vec<Complex64> = v.to_vec();
    for b in basis {
        let c = inner(b, &r);
        for (x, y) in r.iter_mut().zip(b) {
            *x -= c * y;
        }
    }
    norm(&r) / nv
}
