//! Session server for human-versus-engine play on standard and Corrida boards.

mod server;
mod session;
mod store;

pub use server::{Service, ServiceConfig, DEFAULT_IDLE_TIMEOUT};
pub use session::{
    CreateSession, Event, EventKind, Obligation, ObligationStatus, ScriptRequest, SessionCore, Snapshot,
};
pub use store::MoveLog;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ServiceError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("unsupported session: {0}")]
    UnsupportedCombination(String),
    #[error("not your turn")]
    NotYourTurn,
    #[error("illegal move at ply {ply}: {reason}")]
    IllegalMove { reason: String, ply: usize },
    #[error("the game is over")]
    SessionClosed,
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("storage: {0}")]
    Storage(String),
}

impl ServiceError {
    /// Stable error code for JSON bodies.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownSession(_) => "UnknownSession",
            ServiceError::UnsupportedCombination(_) => "UnsupportedCombination",
            ServiceError::NotYourTurn => "NotYourTurn",
            ServiceError::IllegalMove { .. } => "IllegalMove",
            ServiceError::SessionClosed => "SessionClosed",
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::Storage(_) => "Storage",
        }
    }
}
