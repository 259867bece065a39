use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of the operation.
    #[error("domain violation: {0}")]
    Domain(String),
    /// An iteration failed to converge within its iteration budget.
    #[error("failed to converge within {max_iters} iterations")]
    Convergence { max_iters: usize },
    /// A verification suite name was not recognised.
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
