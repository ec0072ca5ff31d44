use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field context: {0}")]
    InvalidField(String),
    #[error("field context mismatch: {0} vs {1}")]
    ContextMismatch(String, String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("enumeration budget exceeded: {needed} candidates > budget {budget}")]
    BudgetExceeded { needed: String, budget: u128 },
    #[error("operation requires a finite field, got {0}")]
    InfiniteField(String),
    #[error("operation requires characteristic != 2")]
    CharacteristicTwo,
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
