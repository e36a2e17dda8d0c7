//! Live operator sessions: a per-session 50 Hz control loop, a websocket
//! telemetry channel and flat-file episode logs.

pub mod error;
pub mod protocol;
pub mod server;
pub mod session;
pub mod store;

pub use error::SessionError;
pub use protocol::{ClientMessage, InputEvent, ServerFrame};
pub use server::{router, serve, AppState, ServerConfig};
pub use session::{Session, SessionStatus};
pub use store::LogStore;
