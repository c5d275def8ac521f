use thiserror::Error;

/// Errors raised by model construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input failed validation. `context` names the offending field or row.
    #[error("invalid {context}: {message}")]
    Validation { context: String, message: String },

    /// Parameters hit a singularity of the closed form (b near 1/i, colliding rates).
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// A matrix exponential left the representable range.
    #[error("numeric range exceeded: {0}")]
    NumericRange(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

impl Error {
    pub(crate) fn invalid(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            context: context.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
