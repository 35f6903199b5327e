//! Projective limits along curve pairs, fiber maps and linear subspaces.

pub mod curves;
pub mod limit;
pub mod maps;
pub mod space;

pub use curves::{substitute, Coef, CurvePair, PointCurve, Reparam};
pub use limit::{
    combine, combine_with, limit, limit_of_combination, proj_limit, proj_limit_with_order, pullback, pullback_single,
    with_truncation_retry, Combination, SeriesMatrix, T_MAX,
};
pub use maps::{
    block_relation_residual, dhat_from_two_m, embed_first, embed_second, gamma_map, lambda_map, lambda_map_with_index,
    row_space, two_m_from_dhat, u_membership,
};
pub use space::{parse_point, ProjPoint, ProjSubspace, TAU_PROJ};
