//! Fibers over the origin for curves on hypersurfaces and plane branches,
//! and the fiber of the double over a diagonal smooth point.

pub mod germ;
pub mod normal;
pub mod plane;
pub mod smooth;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::projan::ProjSubspace;

pub use germ::{derivative_ratio, in_semigroup, CurveGerm, NormalizationMode, PlaneInvariants};
pub use normal::{fiber_dminus, gauss_embedding_test, normal_form, second_intrinsic_derivative, NormalFormInvariants};
pub use plane::{
    case_witness, classify_origin_fiber, derived_case_limit, printed_case_limit, snd_matrix, to_snd, CaseKind,
    CaseWitness, CONORMAL, NORMAL, SND_COLUMNS, TANGENT,
};
pub use smooth::{smooth_point_fiber, tangent_basis, SecantOrientation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FiberKind {
    ConormalP1,
    TangentComponent,
    SpanHl,
    SmoothSpan,
    GenericLine,
}

impl fmt::Display for FiberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FiberKind::ConormalP1 => "CONORMAL_P1",
            FiberKind::TangentComponent => "TANGENT_COMPONENT",
            FiberKind::SpanHl => "SPAN_HL",
            FiberKind::SmoothSpan => "SMOOTH_SPAN",
            FiberKind::GenericLine => "GENERIC_LINE",
        })
    }
}

/// Whether the subspace is the whole fiber or only known to lie in it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberClaim {
    Equal,
    Contained,
}

/// Which homogeneous coordinates play which role.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateConvention {
    pub conormal: Vec<usize>,
    pub tangent: Option<usize>,
    pub normal: Option<usize>,
}

impl CoordinateConvention {
    pub fn conormal(n: usize) -> Self {
        CoordinateConvention { conormal: (0..n).collect(), tangent: None, normal: None }
    }

    /// Conormal, tangent and normal coordinates of the plane-curve `P^3`.
    pub fn plane() -> Self {
        CoordinateConvention { conormal: CONORMAL.to_vec(), tangent: Some(TANGENT), normal: Some(NORMAL) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberDescription {
    pub kind: FiberKind,
    pub subspace: ProjSubspace,
    pub convention: CoordinateConvention,
    pub claim: FiberClaim,
    /// False when the result is computed outside the hypotheses of the
    /// statement it comes from.
    pub within_hypotheses: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}
