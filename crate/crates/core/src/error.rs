use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("Kraus family is not complete: ||sum F^dag F - 1||_op = {residual:.3e}")]
    CompletenessViolation { residual: f64 },

    #[error("map is not completely positive: minimum Choi eigenvalue {min_eigenvalue:.3e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("map is not trace preserving: ||Tr_out J - 1||_op = {residual:.3e}")]
    NotTracePreserving { residual: f64 },

    #[error("argument out of domain: {0}")]
    DomainError(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    #[error("solver stopped without reaching optimality: {0}")]
    NotOptimal(String),

    #[error("environment dimensions missing from the degradability report")]
    DimensionMetadataMissing,

    #[error("invalid channel file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::DomainError(msg.into()))
}

pub(crate) fn shape<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::ShapeMismatch(msg.into()))
}
