use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A hypothesis of a theorem-level operation does not hold for the input.
    #[error("contract violated: {0}")]
    Contract(String),
    /// The scaffold cannot resolve the requested scale.
    #[error("scaffold too coarse: {0}")]
    ScaffoldTooCoarse(String),
    /// Exact search ran out of its node budget.
    #[error("exact search exceeded {budget} nodes; rerun in greedy mode")]
    BudgetExceeded { budget: u64 },
    #[error("unsupported system: {0}")]
    Unsupported(String),
    /// An analytic oracle is undefined for the input (e.g. reducible matrix).
    #[error("oracle undefined: {0}")]
    Oracle(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
