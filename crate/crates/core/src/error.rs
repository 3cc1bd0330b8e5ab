use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid dimension for `{problem}`: {reason}")]
    InvalidDimension { problem: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite {what} at the evaluated point")]
    NonFinite { what: &'static str },

    #[error("unknown solver `{0}` (expected one of msd, mdsd, msd1, msd2)")]
    UnknownSolver(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("performance profile: {0}")]
    Profile(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
