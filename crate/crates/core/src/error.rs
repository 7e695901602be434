use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// An exactness assertion failed (non-integral division, non-integral
    /// eigenvalue, etc). These indicate a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("graph is disconnected: component sizes {0:?}")]
    Disconnected(Vec<usize>),

    #[error("bound not applicable: {0}")]
    NotApplicable(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
