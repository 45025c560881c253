use thiserror::Error;

/// Errors raised across the library.
///
/// The variants line up with the exit-code classes used by the command-line
/// front end: domain problems, precision/inconclusive outcomes and internal
/// inconsistencies.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("grouping error: {0}")]
    Grouping(String),
    #[error("assumption failure: {0}")]
    Assumption(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("derivation error: {0}")]
    Derivation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }

    /// True when retrying at a higher working precision may succeed.
    pub fn is_precision_related(&self) -> bool {
        matches!(self, Error::Precision(_) | Error::NotFound(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
