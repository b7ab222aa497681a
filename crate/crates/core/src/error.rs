use thiserror::Error;

/// Errors raised by the toolkit. Each variant carries a message naming the
/// stage that failed so that batch callers can surface it verbatim.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
