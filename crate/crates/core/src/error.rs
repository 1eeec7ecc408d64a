use thiserror::Error;

/// Errors raised by the class algebra, lifts, classifier, bounds and ingest layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition of an operation was not met.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("no parameter within tolerance of the summand {re}{im:+}i")]
    SummandNotPresent { re: f64, im: f64 },

    #[error("not supported: {0}")]
    NotSupported(String),

    /// The class fails the duality closure required by the classification mode.
    #[error("constraint violated in {mode} mode: {detail}")]
    ConstraintViolated { mode: String, detail: String },

    /// The constraints hold but no case shape matched.
    #[error("class satisfies the {mode} constraints but matches no case shape")]
    Unclassifiable { mode: String },

    #[error("tempered classes carry no trace bound")]
    NoBoundForTempered,

    #[error("no trace bound is defined for case {0}")]
    NoBound(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("transport error: {0}")]
    Transport(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
