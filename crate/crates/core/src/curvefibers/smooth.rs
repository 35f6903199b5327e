//! The fiber of the double of `JM(X)` over `(x, x)` for a smooth point `x`
//! of a hypersurface.

use serde::{Deserialize, Serialize};

use super::normal::second_intrinsic_derivative;
use super::{CoordinateConvention, FiberClaim, FiberDescription, FiberKind};
use crate::error::{Error, Result};
use crate::projan::ProjSubspace;
use crate::symcore::{Poly, Scalar};

/// Sign of the secant block in `D2F(x) v (+/-) v . DF(x)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecantOrientation {
    /// Secant factors `z - z'` as in the generator layout of the double;
    /// limits come out as `Hv (+) (-v . DF)`.
    #[default]
    FirstMinusSecond,
    /// Secant factors `z' - z`; limits come out as `Hv (+) v . DF`.
    SecondMinusFirst,
}

/// A basis of `ker DF(x)`: `e_i - (a_i / a_j) e_j` for the pivot `j` of
/// largest modulus.
pub fn tangent_basis(grad: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
    let j = (0..grad.len())
        .filter(|&i| !grad[i].is_zero())
        .max_by(|&a, &b| grad[a].cmp_abs(&grad[b]))
        .ok_or(Error::NotSmoothPoint)?;
    let inv = grad[j].inv().ok_or(Error::NotSmoothPoint)?;
    Ok((0..grad.len())
        .filter(|&i| i != j)
        .map(|i| {
            let mut v = vec![Scalar::zero(); grad.len()];
            v[i] = Scalar::one();
            v[j] = -&(&grad[i] * &inv);
            v
        })
        .collect())
}

/// `P(span(DF(x) (+) 0, D2F(x) v_j (+) s v_j . DF(x)))` in
/// `P(C^n (+) C^(n^2))`, where `(v . DF)_(k n + j) = v_k dF/dz_j` and
/// `s = -1` or `1` according to `orientation`.
pub fn smooth_point_fiber(f: &Poly, x: &[Scalar], orientation: SecantOrientation) -> Result<FiberDescription> {
    let n = f.nvars();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let grad: Vec<Scalar> = f.gradient().iter().map(|g| g.eval(x)).collect::<Result<_>>()?;
    let basis = tangent_basis(&grad)?;
    let ambient = n + n * n;
    let mut vectors = Vec::with_capacity(n);
    let mut first = grad.clone();
    first.resize(ambient, Scalar::zero());
    vectors.push(first);
    for v in &basis {
        let mut w = second_intrinsic_derivative(f, x, v)?;
        for vk in v {
            for dj in &grad {
                let e = vk * dj;
                w.push(match orientation {
                    SecantOrientation::FirstMinusSecond => -&e,
                    SecantOrientation::SecondMinusFirst => e,
                });
            }
        }
        vectors.push(w);
    }
    Ok(FiberDescription {
        kind: FiberKind::SmoothSpan,
        subspace: ProjSubspace::span(ambient, &vectors)?,
        convention: CoordinateConvention::conormal(n),
        claim: FiberClaim::Equal,
        within_hypotheses: true,
        note: None,
    })
}
