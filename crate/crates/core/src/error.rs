use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("truncation too low: {0}")]
    TruncationTooLow(String),
    #[error("truncation exhausted at T = {0}")]
    TruncationExhausted(i64),
    #[error("series is identically zero")]
    ZeroSeries,
    #[error("series is not a unit (order {0})")]
    NotAUnit(String),
    #[error("derivative ratio is not analytic: {0}")]
    NotAnalytic(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("sampler exhausted after {0} attempts")]
    SamplerExhausted(usize),
    #[error("indeterminate limit: {0}")]
    IndeterminateLimit(String),
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("point pair lies on the diagonal")]
    DiagonalPoint,
    #[error("blocks do not satisfy w_j = (x_j - x'_j)/(x_i - x'_i) w_i: {0}")]
    InconsistentBlocks(String),
    #[error("curve does not lie on the variety: {0}")]
    NotOnVariety(String),
    #[error("point is not a smooth point")]
    NotSmoothPoint,
    #[error("vector is not tangent (DF(x)·v = {0})")]
    NotTangentVector(String),
    #[error("curve has multiplicity one at the origin")]
    MultiplicityOne,
    #[error("not a standard normalization: {0}")]
    NotStandardNormalization(String),
    #[error("degenerate normal form: {0}")]
    DegenerateNormalForm(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("extrapolation unstable: {0}")]
    ExtrapolationUnstable(String),
}
