use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("prime table covers up to {limit}, which cannot sieve a segment ending at {hi}")]
    InsufficientBasePrimes { limit: u64, hi: u64 },

    #[error("value {value} lies outside the prime table (limit {limit})")]
    OutOfTable { value: u64, limit: u64 },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("sink write failed: {0}")]
    Sink(#[from] io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
