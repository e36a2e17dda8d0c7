//! HTTP and websocket front end.
//!
//! Each session runs as its own task that owns the [`Session`]. Client
//! messages reach it through one ordered mailbox, so of two inputs that
//! arrive before a tick the later one wins. Frames fan out through a
//! broadcast channel.

use std::collections::HashMap;
use std::future::Future;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use commshare_core::{library, EngineConfig, Scenario};
use futures::{SinkExt, StreamExt};
use serde::{Deserialize, Serialize};
use tokio::sync::{broadcast, mpsc, watch};
use tokio::time::{Instant, MissedTickBehavior};

use crate::error::SessionError;
use crate::protocol::{ClientMessage, ErrorFrame, PublicScenario, ScenarioSummary, ServerFrame};
use crate::session::{Session, SessionStatus};
use crate::store::LogStore;

pub const DEFAULT_DISCONNECT_HOLD: Duration = Duration::from_secs(5);

#[derive(Clone, Debug)]
pub struct ServerConfig {
    /// Extra scenario files (`<id>.json`); shipped scenarios are always available.
    pub scenario_dir: Option<PathBuf>,
    pub log_dir: PathBuf,
    /// Static files (the operator console) served at `/`.
    pub static_dir: Option<PathBuf>,
    /// How long a running session waits for its client to come back.
    pub disconnect_hold: Duration,
}

impl ServerConfig {
    pub fn new(log_dir: impl Into<PathBuf>) -> Self {
        Self { scenario_dir: None, log_dir: log_dir.into(), static_dir: None, disconnect_hold: DEFAULT_DISCONNECT_HOLD }
    }
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

struct Inner {
    config: ServerConfig,
    store: LogStore,
    sessions: Mutex<HashMap<String, SessionHandle>>,
}

#[derive(Clone)]
struct SessionHandle {
    scenario_id: String,
    mailbox: mpsc::UnboundedSender<Command>,
    frames: broadcast::Sender<String>,
    status: watch::Receiver<SessionStatus>,
    connected: Arc<AtomicBool>,
}

#[derive(Debug)]
enum Command {
    Client(ClientMessage),
    Rejected(SessionError),
    Connected,
    Disconnected,
}

impl AppState {
    pub fn new(config: ServerConfig) -> std::io::Result<Self> {
        let store = LogStore::new(&config.log_dir)?;
        Ok(Self(Arc::new(Inner { config, store, sessions: Mutex::new(HashMap::new()) })))
    }

    pub fn store(&self) -> &LogStore {
        &self.0.store
    }

    /// Creates a session in the lobby and starts its control task.
    pub fn create_session(&self, scenario_id: &str, config: EngineConfig) -> Result<String, SessionError> {
        let scenario = find_scenario(self.0.config.scenario_dir.as_deref(), scenario_id)?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::new(id.clone(), scenario, config)?;
        let (mailbox, rx) = mpsc::unbounded_channel();
        let (frames, _) = broadcast::channel(1024);
        let (status_tx, status) = watch::channel(SessionStatus::Lobby);
        let handle = SessionHandle {
            scenario_id: scenario_id.to_owned(),
            mailbox,
            frames: frames.clone(),
            status,
            connected: Arc::new(AtomicBool::new(false)),
        };
        tokio::spawn(run_session(session, rx, frames, status_tx, self.0.store.clone(), self.0.config.disconnect_hold));
        self.0.sessions.lock().expect("session table").insert(id.clone(), handle);
        Ok(id)
    }

    fn session(&self, id: &str) -> Result<SessionHandle, SessionError> {
        self.0
            .sessions
            .lock()
            .expect("session table")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::SessionNotFound(id.to_owned()))
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub fn find_scenario(dir: Option<&Path>, id: &str) -> Result<Scenario, SessionError> {
    if !valid_id(id) {
        return Err(SessionError::ScenarioNotFound(id.to_owned()));
    }
    library::resolve(id, dir).map_err(|_| SessionError::ScenarioNotFound(id.to_owned()))
}

/// Shipped scenarios plus readable files in `dir`; files win on id clashes.
pub fn list_scenarios(dir: Option<&Path>) -> Vec<Scenario> {
    let mut by_id: std::collections::BTreeMap<String, Scenario> =
        library::all().into_iter().map(|s| (s.id.clone(), s)).collect();
    if let Some(entries) = dir.and_then(|d| std::fs::read_dir(d).ok()) {
        for path in entries.flatten().map(|e| e.path()) {
            if path.extension().is_some_and(|e| e == "json") {
                match Scenario::load(&path) {
                    Ok(sc) => {
                        by_id.insert(sc.id.clone(), sc);
                    }
                    Err(e) => tracing::warn!("skipping {}: {e}", path.display()),
                }
            }
        }
    }
    by_id.into_values().collect()
}

async fn run_session(
    mut session: Session,
    mut mailbox: mpsc::UnboundedReceiver<Command>,
    frames: broadcast::Sender<String>,
    status: watch::Sender<SessionStatus>,
    store: LogStore,
    hold: Duration,
) {
    let mut ticker = tokio::time::interval(Duration::from_secs_f64(session.scenario().tick_dt));
    ticker.set_missed_tick_behavior(MissedTickBehavior::Burst);
    let mut connected = false;
    let mut hold_until: Option<Instant> = None;
    let send = |f: &ServerFrame| {
        let _ = frames.send(f.to_json());
    };
    let error = |e: &SessionError| send(&ServerFrame::Error(ErrorFrame::from(e)));

    loop {
        let ticking = connected && session.is_running();
        let deadline = hold_until.unwrap_or_else(|| Instant::now() + Duration::from_secs(86_400));
        tokio::select! {
            biased;
            cmd = mailbox.recv() => {
                let Some(cmd) = cmd else { break };
                match cmd {
                    Command::Connected => {
                        connected = true;
                        hold_until = None;
                        ticker.reset();
                        send(&session.hello());
                    }
                    Command::Disconnected => {
                        connected = false;
                        if session.is_running() {
                            hold_until = Some(Instant::now() + hold);
                        }
                    }
                    Command::Rejected(e) => error(&e),
                    Command::Client(ClientMessage::Start) => match session.start() {
                        Ok(()) => ticker.reset(),
                        Err(e) => error(&e),
                    },
                    Command::Client(ClientMessage::Input(ev)) => {
                        if let Err(e) = session.submit_input(&ev) {
                            error(&e);
                        }
                    }
                    Command::Client(ClientMessage::Reset) => match session.reset() {
                        Ok(previous) => {
                            if let Some((run, log)) = previous {
                                flush(&store, session.id(), run, &log);
                            }
                            send(&session.hello());
                        }
                        Err(e) => error(&e),
                    },
                }
            }
            _ = ticker.tick(), if ticking => {
                match session.tick() {
                    Ok(out) => {
                        if let Some((run, log)) = session.take_finished_log() {
                            flush(&store, session.id(), run, &log);
                        }
                        out.iter().for_each(send);
                    }
                    Err(e) => {
                        tracing::error!(session = session.id(), "tick failed: {e}");
                        error(&e);
                        session.abort();
                    }
                }
            }
            _ = tokio::time::sleep_until(deadline), if hold_until.is_some() => {
                hold_until = None;
                if let Some(end) = session.abort() {
                    tracing::info!(session = session.id(), "client did not return; aborting");
                    if let Some((run, log)) = session.take_finished_log() {
                        flush(&store, session.id(), run, &log);
                    }
                    send(&end);
                }
            }
        }
        status.send_replace(session.status());
    }
}

fn flush(store: &LogStore, id: &str, run: u32, log: &commshare_core::EpisodeLog) {
    match store.write(id, run, log) {
        Ok(path) => tracing::info!(session = id, "log written to {}", path.display()),
        Err(e) => tracing::error!(session = id, "could not write log: {e}"),
    }
}

pub fn router(state: AppState) -> Router {
    let static_dir = state.0.config.static_dir.clone();
    let api = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_status))
        .route("/sessions/{id}/ws", get(session_socket))
        .route("/scenarios", get(scenarios))
        .route("/scenarios/{id}", get(scenario))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    config: ServerConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let app = router(AppState::new(config)?);
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}

struct ApiError(StatusCode, SessionError);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match e {
            SessionError::ScenarioNotFound(_) | SessionError::SessionNotFound(_) => StatusCode::NOT_FOUND,
            SessionError::ConfigInvalid(_) | SessionError::Malformed(_) => StatusCode::BAD_REQUEST,
            SessionError::AlreadyConnected | SessionError::SessionFinished | SessionError::NotRunning => {
                StatusCode::CONFLICT
            }
            SessionError::Engine(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(ServerFrame::Error(ErrorFrame::from(&self.1)))).into_response()
    }
}

#[derive(Debug, Deserialize)]
struct CreateSessionRequest {
    scenario_id: String,
    #[serde(default)]
    config: Option<serde_json::Value>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub scenario_id: String,
    pub status: SessionStatus,
}

async fn create_session(State(state): State<AppState>, body: String) -> Result<Response, ApiError> {
    let req: CreateSessionRequest =
        serde_json::from_str(&body).map_err(|e| SessionError::Malformed(e.to_string()))?;
    let config = match req.config {
        Some(v) => serde_json::from_value(v).map_err(|e| SessionError::ConfigInvalid(e.to_string()))?,
        None => EngineConfig::default(),
    };
    if let Err(e) = config.validate() {
        return Err(SessionError::ConfigInvalid(e.to_string()).into());
    }
    let id = state.create_session(&req.scenario_id, config)?;
    let info = SessionInfo { session_id: id, scenario_id: req.scenario_id, status: SessionStatus::Lobby };
    Ok((StatusCode::CREATED, Json(info)).into_response())
}

async fn session_status(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<SessionInfo>, ApiError> {
    let h = state.session(&id)?;
    let status = *h.status.borrow();
    Ok(Json(SessionInfo { session_id: id, scenario_id: h.scenario_id, status }))
}

async fn scenarios(State(state): State<AppState>) -> Json<Vec<ScenarioSummary>> {
    let list = list_scenarios(state.0.config.scenario_dir.as_deref())
        .into_iter()
        .map(|s| ScenarioSummary { dim: s.dim(), num_stages: s.num_stages(), id: s.id, description: s.description })
        .collect();
    Json(list)
}

async fn scenario(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<PublicScenario>, ApiError> {
    let sc = find_scenario(state.0.config.scenario_dir.as_deref(), &id)?;
    Ok(Json(PublicScenario::from(&sc)))
}

async fn session_socket(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ApiError> {
    let h = state.session(&id)?;
    if h.connected.compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire).is_err() {
        return Err(SessionError::AlreadyConnected.into());
    }
    Ok(ws.on_upgrade(move |socket| client_loop(socket, h)))
}

async fn client_loop(socket: WebSocket, h: SessionHandle) {
    let (mut sink, mut stream) = socket.split();
    let mut frames = h.frames.subscribe();
    let _ = h.mailbox.send(Command::Connected);
    let forward = tokio::spawn(async move {
        loop {
            match frames.recv().await {
                Ok(text) => {
                    if sink.send(Message::Text(text.into())).await.is_err() {
                        break;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(n)) => tracing::warn!("client lagged by {n} frames"),
                Err(broadcast::error::RecvError::Closed) => break,
            }
        }
    });
    while let Some(Ok(msg)) = stream.next().await {
        let cmd = match msg {
            Message::Text(text) => match ClientMessage::parse(text.as_str()) {
                Ok(m) => Command::Client(m),
                Err(e) => Command::Rejected(e),
            },
            Message::Binary(_) => Command::Rejected(SessionError::Malformed("binary frames are not accepted".into())),
            Message::Close(_) => break,
            _ => continue,
        };
        if h.mailbox.send(cmd).is_err() {
            break;
        }
    }
    forward.abort();
    h.connected.store(false, Ordering::Release);
    let _ = h.mailbox.send(Command::Disconnected);
}
