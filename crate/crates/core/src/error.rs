use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A size guard was exceeded (partition weight, sieve length, ...).
    #[error("size limit exceeded for {what}: {got} > {limit}")]
    SizeLimit {
        what: &'static str,
        limit: u64,
        got: u64,
    },

    /// A caller violated a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An index or argument fell outside the range a table covers.
    #[error("out of range: {0}")]
    Range(String),

    /// Checked integer arithmetic overflowed. Never silent.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// A numerical routine failed to converge or self-validate.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// An internal consistency check tripped (e.g. root number != i^k).
    #[error("inconsistency: {0}")]
    Inconsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
