use thiserror::Error;

/// Errors raised by the numerical routines and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("sequence length {len} exceeds the configured maximum {max}")]
    TooLong { len: usize, max: usize },

    #[error("invalid Lorentz parameters: {0}")]
    InvalidParams(String),

    /// The result exists mathematically but does not fit in an `f64`.
    #[error("value out of f64 range (natural log of the value is {log_value})")]
    OutOfRange { log_value: f64 },

    #[error("cannot factor an all-zero sequence")]
    ZeroSequence,

    #[error("empty vector family")]
    EmptyFamily,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("inadmissible exponents: {0}")]
    InadmissibleExponents(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("incompatible shapes: {0}")]
    Shape(String),

    #[error(
        "eigenvalue iteration did not converge within {budget} iterations \
         ({unresolved} eigenvalues unresolved)"
    )]
    NoConvergence { budget: usize, unresolved: usize },

    #[error("matrix order {order} exceeds the eigensolver limit {limit}")]
    OrderTooLarge { order: usize, limit: usize },

    #[error("|z|*rho = {value} >= 1, the trace-power series diverges")]
    DivergenceRegion { value: f64 },

    #[error("norm bound violated: {norm} > r0 = {r0}")]
    NormBound { norm: f64, r0: f64 },

    #[error("contour quadrature needs at least {min} points, got {got}")]
    TooFewPoints { got: usize, min: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
