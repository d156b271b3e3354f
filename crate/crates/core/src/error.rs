//! Error type shared by all modules.

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: indices out of range, mismatched lengths, violated
    /// preconditions on user-supplied data.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A guarded operation was asked to handle an instance too large for
    /// exhaustive processing.
    #[error("capacity exceeded: {what} requires n <= {limit}, got n = {actual}")]
    Capacity {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    /// A numerical routine failed to converge or hit its safety cap.
    #[error("numerical failure in {context}: {details}")]
    Numerical {
        context: &'static str,
        details: String,
    },

    /// The constraint family admits no feasible solution for the request.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Incompatible policy, constraint mode, or parameter combination.
    #[error("configuration error: {0}")]
    Config(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
