use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid predicate: {0}")]
    InvalidPredicate(String),

    /// The predicate has no literal characters (`%`, `%%`, `_%` ...). Callers
    /// estimating selectivity treat it as matching every row.
    #[error("pattern has no literal characters")]
    DegeneratePattern,

    #[error("invalid pattern {pattern:?}: {reason}")]
    InvalidPattern { pattern: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("histogram build error: {0}")]
    Build(String),

    #[error("unsupported version: {0:?}")]
    UnsupportedVersion(String),

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("workload generation error: {0}")]
    Generation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }
}
