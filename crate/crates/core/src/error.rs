use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("node `{0}` is not a candidate for probing (already explored)")]
    AlreadyExplored(String),

    #[error("node `{0}` is not present in the observed graph")]
    NotObserved(String),

    #[error("probe budget of {budget} exhausted")]
    BudgetExhausted { budget: usize },

    #[error("({0}, {1}) is not an edge of the observed graph")]
    NotAnEdge(String, String),

    #[error("observed graph has no candidate nodes")]
    NoCandidates,

    #[error("sample is empty: {0}")]
    EmptySample(String),

    #[error("random walk gave up after {steps} steps with {achieved} of {target} edges observed")]
    WalkStepLimit { steps: u64, achieved: usize, target: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("observed graph is inconsistent with the complete graph: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
