use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An index exceeds the stored range of a sequence or table.
    #[error("index {index} out of range (available: {available})")]
    OutOfRange { index: usize, available: usize },

    /// A generator violates its invariants.
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    /// A sequence is too short to decide the requested quantity.
    #[error("sequence too short: {0}")]
    SequenceTooShort(String),

    /// The function vanishes identically, so its zero set is infinite.
    #[error("function vanishes identically (infinitely many zeros)")]
    IdenticallyZero,

    /// The operation requires a finite Bang degree.
    #[error("Bang degree is unbounded")]
    UnboundedDegree,

    /// Catch-all for malformed input.
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
