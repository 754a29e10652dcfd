use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A table refers to an id that does not exist, or is otherwise malformed.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("pullback missing (axiom P violated): {0}")]
    PullbackMissing(String),

    #[error("cannot order {left} and {right} at {digits} digits; supply more digits or raise SCK1_PRECISION")]
    Precision {
        left: String,
        right: String,
        digits: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An internal invariant failed; this indicates a bug, not bad input.
    #[error("internal consistency error: {0}")]
    Inconsistent(String),

    #[error("missing splitting for cofiber sequence {0}")]
    MissingSplitting(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's data rather than a failed check.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Structural(_) | Error::Input(_) | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
