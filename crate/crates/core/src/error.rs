use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    #[error("numerical blow-up at t = {t}")]
    BlowUp { t: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Divergence { iterations: usize, residual: f64 },

    #[error("normalization mismatch: direct maximization gives M = {direct}, eigen route gives M = {eigen}")]
    NormalizationMismatch { direct: f64, eigen: f64 },

    #[error("a-priori bound violated: {0}")]
    FailedBound(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
