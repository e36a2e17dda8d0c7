use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported workspace dimension {0}")]
    InvalidDimension(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("goal set is empty")]
    EmptyGoalSet,

    #[error("goal {0:?} is not in the belief support")]
    UnknownGoal(String),

    #[error("candidate action set is empty")]
    EmptyCandidates,

    #[error("invalid rationality {0}: must be finite and >= 0")]
    InvalidRationality(f64),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid belief: {0}")]
    InvalidBelief(String),

    #[error("episode is not running")]
    NotRunning,
}
