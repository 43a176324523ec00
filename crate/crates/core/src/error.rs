use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A field still carries weight at the grid ends, so no cutoff radius
    /// exists inside the computational box.
    #[error("field does not decay inside the grid: {0}")]
    Decay(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("bracket does not isolate a ground state: {0}")]
    Bracket(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
