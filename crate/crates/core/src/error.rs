use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested tail tolerance could not be met within the index cap.
    #[error("truncation error: tail bound {achieved:e} after {max_index} terms exceeds the tolerance")]
    Truncation { achieved: f64, max_index: usize },

    /// A branch equation has no root in its bracket.
    #[error("no root: {0}")]
    NoRoot(String),

    /// Fundamental-domain reduction did not settle within the iteration cap.
    #[error("reduction error: {0}")]
    Reduction(String),

    /// Malformed user input.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
