use thiserror::Error;

/// Errors raised by the spectral pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot parse {text:?} as a decimal number: {reason}")]
    Parse { text: String, reason: String },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("overflow in {context}; retry with extended precision or probe closer to the spectrum")]
    Overflow { context: String },

    #[error("{method} failed to converge after {iterations} iterations")]
    NoConvergence { method: &'static str, iterations: usize },

    #[error("size limit exceeded: {what} would be {size}, cap is {cap}")]
    LimitExceeded { what: &'static str, size: u128, cap: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures that come from the numerics rather than from the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_) | Error::Overflow { .. } | Error::NoConvergence { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
