use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside an operation's domain (non-unit quaternion, chart radius, mismatched base points).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("branch error: {0}")]
    Branch(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// A frame state on an excluded locus (vanishing sine of an angle difference, or the
    /// quadratic constraint `4v₁² − 3(v₂² + v₃²)` vanishing).
    #[error("invalid frame state: {0}")]
    InvalidState(String),

    /// A linear subsystem that should be solvable turned out singular.
    #[error("singular system: {0}")]
    Singular(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown example {0:?}")]
    UnknownExample(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
