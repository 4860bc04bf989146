use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point or value lies outside a feature domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model, sample or problem failed structural validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// Input text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Expected values need numeric model outputs.
    #[error("numeric outputs required: {0}")]
    NumericRequired(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} supports at most {limit} features, got {got}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed input rather than by a failed
    /// computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Validation(_)
                | Error::Parse(_)
                | Error::InvalidArgument(_)
                | Error::Io(_)
        )
    }
}
