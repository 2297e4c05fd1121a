use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource cap exceeded: {what} needs {needed} entries, cap is {cap}")]
    Resource {
        what: String,
        needed: u128,
        cap: u128,
    },

    #[error("singular Gram matrix for N = {n}, k = {k} (rank {rank} < {size})")]
    Singular {
        n: usize,
        k: usize,
        rank: usize,
        size: usize,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
