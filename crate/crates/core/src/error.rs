use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of an operation (empty cloud, bad threshold, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Simplex enumeration exceeded the configured budget.
    #[error("resource error: simplex budget of {budget} exceeded while enumerating dimension {dim}")]
    Budget { dim: usize, budget: usize },

    /// Malformed input file. `row` is the 1-based line number in the file.
    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    /// Experiment configuration failed validation.
    #[error("config error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
