use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} requires an irrational argument")]
    RationalArgument(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mode {index} is singular: frequency times gap over pi is {phase}")]
    SingularMode { index: String, phase: String },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
