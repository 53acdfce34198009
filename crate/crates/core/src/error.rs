use thiserror::Error;

/// Errors raised by the algebra engine.
///
/// Mathematical check failures that are expected outcomes (a validator
/// finding a violated identity) are reported through the report types, not
/// through this enum. These variants are for broken preconditions and for
/// runtime assertions that stop a construction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("map is not homogeneous of degree {degree}: entry ({row}, {col})")]
    NotHomogeneous { degree: i32, row: usize, col: usize },
    #[error("coefficient hbar^{exponent} read outside the trusted window [{lo}, {hi}]")]
    OutsideWindow { exponent: i32, lo: i32, hi: i32 },
    #[error("trusted window is empty at tau-order {order} (hbar order too small)")]
    WindowUnderflow { order: usize },
    #[error("exponential of a series with a nonzero tau-constant term")]
    ExpOfConstant,
    #[error("inner product is not positive definite in degree {degree}")]
    NotPositiveDefinite { degree: i32 },
    #[error("operator order must be nonnegative, got {0}")]
    NegativeOrder(i64),
    #[error("obstruction at tau-order {order}: P'(R) != 0 at monomial {monomial}")]
    Obstruction { order: usize, monomial: String },
    #[error("negative hbar power at tau-order {order}, monomial {monomial}")]
    NegativePower { order: usize, monomial: String },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("decomposition failure: {0}")]
    Decomposition(String),
    #[error("schema violation at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("degree inconsistency: {0}")]
    DegreeInconsistency(String),
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
