#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("scenario {0:?} not found")]
    ScenarioNotFound(String),
    #[error("session {0:?} not found")]
    SessionNotFound(String),
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error("session has finished")]
    SessionFinished,
    #[error("session is not running")]
    NotRunning,
    #[error("session already has a connected client")]
    AlreadyConnected,
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("engine error: {0}")]
    Engine(#[from] commshare_core::Error),
}

impl SessionError {
    /// Stable machine-readable code sent in error frames.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::ScenarioNotFound(_) => "scenario_not_found",
            SessionError::SessionNotFound(_) => "session_not_found",
            SessionError::ConfigInvalid(_) => "config_invalid",
            SessionError::SessionFinished => "session_finished",
            SessionError::NotRunning => "session_not_running",
            SessionError::AlreadyConnected => "already_connected",
            SessionError::Malformed(_) => "malformed_message",
            SessionError::Engine(_) => "engine_error",
        }
    }
}
