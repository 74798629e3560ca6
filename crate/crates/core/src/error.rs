use thiserror::Error;

/// Errors raised by the toolkit. Numerical non-convergence is never an error;
/// it is reported through flags on the returned certificates.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("state vector is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("operator is not an orthogonal projector (residual {0:e})")]
    NotProjector(f64),

    #[error("elements do not sum to the identity (deviation {0:e})")]
    NotComplete(f64),

    #[error("unknown register label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate register label `{0}`")]
    DuplicateLabel(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("domination is unbounded: operator support leaves the reference support (leak {0:e})")]
    Unbounded(f64),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid state transition: {0}")]
    Protocol(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
