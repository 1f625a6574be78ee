use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("numerical divergence at t = {time}: {reason}")]
    Divergence { time: f64, reason: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("unsupported report schema version {found} (expected {expected})")]
    SchemaVersion { found: u64, expected: u64 },

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("unknown {kind} `{name}` (known: {known})")]
    UnknownName {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
