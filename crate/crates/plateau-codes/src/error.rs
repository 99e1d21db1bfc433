use thiserror::Error;

/// Crate-wide error type. The categories map onto the CLI exit codes:
/// parse errors exit 1, classification failures exit 2, sizing-guard
/// violations exit 3, hypothesis violations exit 4, verification failures 5.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("classification failure: {0}")]
    Classify(String),

    #[error("sizing guard exceeded: {0}")]
    Guard(String),

    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    #[error("verification failure: {0}")]
    Verification(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 1,
            Error::Classify(_) => 2,
            Error::Guard(_) => 3,
            Error::Hypothesis(_) => 4,
            Error::Verification(_) => 5,
            Error::Invalid(_) => 1,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
