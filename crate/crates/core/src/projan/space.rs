//! Points and linear subspaces of complex projective space.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::symcore::{parse_scalar, Scalar};

/// Angular tolerance for projective equality and membership.
pub const TAU_PROJ: f64 = 1e-8;

/// Homogeneous coordinates, scaled so that the first coordinate of maximal
/// modulus is 1.
#[derive(Clone, Debug)]
pub struct ProjPoint {
    coords: Vec<Scalar>,
}

impl ProjPoint {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        let exact = coords.iter().all(Scalar::is_exact);
        let pivot = if exact {
            let mut best: Option<usize> = None;
            for (i, c) in coords.iter().enumerate() {
                if c.is_exact_zero() {
                    continue;
                }
                if best.is_none_or(|b| c.cmp_abs(&coords[b]) == std::cmp::Ordering::Greater) {
                    best = Some(i);
                }
            }
            best
        } else {
            let max = coords.iter().map(Scalar::abs).fold(0.0, f64::max);
            if max == 0.0 {
                None
            } else {
                coords.iter().position(|c| c.abs() >= max * (1.0 - 1e-12))
            }
        };
        let p = pivot.ok_or(Error::ZeroVector)?;
        let inv = coords[p].inv().ok_or(Error::ZeroVector)?;
        let mut coords: Vec<Scalar> = coords.iter().map(|c| c * &inv).collect();
        coords[p] = Scalar::one();
        Ok(ProjPoint { coords })
    }

    pub fn from_ints(v: &[i64]) -> Result<Self> {
        Self::new(v.iter().map(|&k| Scalar::from_int(k)).collect())
    }

    pub fn from_c64(v: &[Complex64]) -> Result<Self> {
        Self::new(v.iter().map(|&z| Scalar::from_c64(z)).collect())
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.coords.iter().all(Scalar::is_exact)
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        linalg::to_c64(&self.coords)
    }

    /// Unit-norm representative.
    pub fn unit(&self) -> Vec<Complex64> {
        let v = self.to_c64();
        let n = linalg::norm(&v);
        v.into_iter().map(|z| z / n).collect()
    }

    /// Sine of the angle between the two lines (the Fubini-Study distance
    /// to first order); 1 for points of different ambient spaces.
    pub fn distance(&self, other: &ProjPoint) -> f64 {
        if self.len() != other.len() {
            return 1.0;
        }
        linalg::residual(&[self.unit()], &other.unit())
    }

    /// Exact proportionality for exact points, `distance < tol` otherwise.
    pub fn approx_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        if self.is_exact() && other.is_exact() {
            return self.coords == other.coords;
        }
        self.distance(other) < tol
    }

    /// Keeps the listed coordinates.
    pub fn select(&self, idx: &[usize]) -> Result<ProjPoint> {
        ProjPoint::new(idx.iter().map(|&i| self.coords[i].clone()).collect())
    }

    /// Largest modulus among the listed coordinates, relative to the
    /// largest coordinate overall.
    pub fn relative_magnitude(&self, idx: &[usize]) -> f64 {
        let max = self.coords.iter().map(Scalar::abs).fold(0.0, f64::max);
        idx.iter().map(|&i| self.coords[i].abs()).fold(0.0, f64::max) / max
    }
}

impl PartialEq for ProjPoint {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, TAU_PROJ)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", s.join(", "))
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<Scalar> = Vec::deserialize(d)?;
        ProjPoint::new(v).map_err(serde::de::Error::custom)
    }
}

/// A projective linear subspace, stored as an orthonormal basis of the
/// underlying vector space and, when everything is exact, a reduced
/// row-echelon basis as well.
#[derive(Clone, Debug)]
pub struct ProjSubspace {
    ambient: usize,
    exact: Option<Matrix>,
    basis: Vec<Vec<Complex64>>,
}

impl ProjSubspace {
    /// Span of the given vectors in `C^ambient`.
    pub fn span(ambient: usize, vectors: &[Vec<Scalar>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::DimensionMismatch { expected: ambient, got: v.len() });
        }
        let exact = if linalg::is_exact(vectors) { Some(linalg::rref_exact(vectors)) } else { None };
        let floats: Vec<Vec<Complex64>> = vectors.iter().map(|v| linalg::to_c64(v)).collect();
        let basis = match &exact {
            Some(rows) => linalg::orthonormal_basis(&rows.iter().map(|r| linalg::to_c64(r)).collect::<Vec<_>>(), ambient),
            None => linalg::orthonormal_basis(&floats, ambient),
        };
        Ok(ProjSubspace { ambient, exact, basis })
    }

    pub fn from_points(points: &[ProjPoint]) -> Result<Self> {
        let ambient = points.first().map(ProjPoint::len).ok_or(Error::ZeroVector)?;
        Self::span(ambient, &points.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>())
    }

    /// The coordinate subspace spanned by the listed unit vectors.
    pub fn coordinate(ambient: usize, idx: &[usize]) -> Self {
        let vectors: Vec<Vec<Scalar>> = idx
            .iter()
            .map(|&i| (0..ambient).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
            .collect();
        Self::span(ambient, &vectors).expect("coordinate vectors fit")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn vector_dim(&self) -> usize {
        match &self.exact {
            Some(rows) => rows.len(),
            None => self.basis.len(),
        }
    }

    /// Projective dimension; `-1` for the empty subspace.
    pub fn dim(&self) -> i64 {
        self.vector_dim() as i64 - 1
    }

    pub fn orthonormal_basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    /// Spanning vectors: the row-reduced basis when exact, otherwise the
    /// orthonormal one.
    pub fn basis_vectors(&self) -> Vec<Vec<Scalar>> {
        match &self.exact {
            Some(rows) => rows.clone(),
            None => self.basis.iter().map(|v| v.iter().map(|&z| Scalar::from_c64(z)).collect()).collect(),
        }
    }

    /// Relative distance `|v - Pv| / |v|` of a vector to the subspace.
    pub fn distance_vec(&self, v: &[Scalar]) -> f64 {
        if let Some(rows) = &self.exact {
            if v.iter().all(Scalar::is_exact) {
                let mut all = rows.clone();
                all.push(v.to_vec());
                return if linalg::rref_exact(&all).len() == rows.len() { 0.0 } else { linalg::residual(&self.basis, &linalg::to_c64(v)).max(f64::MIN_POSITIVE) };
            }
        }
        linalg::residual(&self.basis, &linalg::to_c64(v))
    }

    pub fn distance(&self, p: &ProjPoint) -> f64 {
        if p.len() != self.ambient {
            return 1.0;
        }
        self.distance_vec(p.coords())
    }

    pub fn contains(&self, p: &ProjPoint, tol: f64) -> bool {
        p.len() == self.ambient && self.distance(p) < tol
    }

    /// Projective span of the union.
    pub fn join(&self, other: &ProjSubspace) -> Result<ProjSubspace> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, got: other.ambient });
        }
        let mut v = self.basis_vectors();
        v.extend(other.basis_vectors());
        Self::span(self.ambient, &v)
    }

    /// Image under `C^m -> C^ambient` placing coordinates at `offset`.
    pub fn embed(&self, ambient: usize, offset: usize) -> Result<ProjSubspace> {
        if offset + self.ambient > ambient {
            return Err(Error::DimensionMismatch { expected: ambient, got: offset + self.ambient });
        }
        let v: Vec<Vec<Scalar>> = self
            .basis_vectors()
            .into_iter()
            .map(|b| {
                let mut w = vec![Scalar::zero(); ambient];
                for (i, c) in b.into_iter().enumerate() {
                    w[offset + i] = c;
                }
                w
            })
            .collect();
        Self::span(ambient, &v)
    }

    pub fn contains_subspace(&self, other: &ProjSubspace, tol: f64) -> bool {
        other.ambient == self.ambient && other.basis_vectors().iter().all(|v| self.distance_vec(v) < tol)
    }

    pub fn approx_eq(&self, other: &ProjSubspace, tol: f64) -> bool {
        self.vector_dim() == other.vector_dim() && self.contains_subspace(other, tol) && other.contains_subspace(self, tol)
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    ambient: usize,
    dim: i64,
    basis: Vec<Vec<Scalar>>,
}

impl Serialize for ProjSubspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceRepr { ambient: self.ambient, dim: self.dim(), basis: self.basis_vectors() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjSubspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SubspaceRepr::deserialize(d)?;
        ProjSubspace::span(r.ambient, &r.basis).map_err(serde::de::Error::custom)
    }
}

impl PartialEq for ProjSubspace {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, TAU_PROJ)
    }
}

/// Parses a point from coordinate strings in the scalar grammar.
pub fn parse_point(items: &[&str]) -> Result<Vec<Scalar>> {
    items.iter().map(|s| parse_scalar(s)).collect()
}
