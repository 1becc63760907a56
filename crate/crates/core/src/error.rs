use thiserror::Error;

/// Syntax error with a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

/// Errors raised by the construction and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DenjoyError {
    #[error("unsupported ordinal notation: {0}")]
    UnsupportedOrdinal(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("interval {0} is not contained in the host {1}")]
    OutsideHost(String, String),
    #[error("wrong node kind: expected {expected}, found {found}")]
    WrongNodeKind { expected: &'static str, found: &'static str },
    #[error("probe budget too small: {0}")]
    ProbeTooSmall(String),
}

/// Errors raised by the module-theory decision engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("malformed formula: {0}")]
    Malformed(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}
