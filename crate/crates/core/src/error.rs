use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: unexpected token `{token}`: {message}")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("size {size} exceeds the limit {limit} for exhaustive search")]
    SizeGuard { size: usize, limit: usize },

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
