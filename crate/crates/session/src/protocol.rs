//! Wire protocol between the session server and an operator client.
//!
//! Every frame is a JSON object with a `type` discriminator. Server frames
//! also carry `schema_version`.

use commshare_core::sim::EpisodeMetrics;
use commshare_core::{Goal, Scenario, TickRecord, Termination};
use serde::{Deserialize, Serialize};

use crate::error::SessionError;

pub const PROTOCOL_VERSION: u32 = 1;

/// Decimal places kept for streamed belief values.
pub const BELIEF_DECIMALS: i32 = 4;

/// Joystick deflection per axis in `[-1, 1]`; the server scales it by `v_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputEvent {
    pub dx: f64,
    pub dy: f64,
    #[serde(default)]
    pub dz: f64,
    /// Client clock in ticks, informational only.
    #[serde(default)]
    pub t: i64,
}

impl InputEvent {
    pub fn validate(&self) -> Result<(), SessionError> {
        for (axis, v) in [("dx", self.dx), ("dy", self.dy), ("dz", self.dz)] {
            if !v.is_finite() || v.abs() > 1.0 {
                return Err(SessionError::Malformed(format!("{axis} = {v} is outside [-1, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Input(InputEvent),
    Start,
    Reset,
}

impl ClientMessage {
    pub fn parse(text: &str) -> Result<Self, SessionError> {
        serde_json::from_str(text).map_err(|e| SessionError::Malformed(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TickFrame {
    pub schema_version: u32,
    pub t: u64,
    pub s: Vec<f64>,
    pub alpha: f64,
    pub a_b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub belief: Option<Vec<(String, f64)>>,
    pub status: String,
}

impl TickFrame {
    /// Telemetry for one tick. The belief is left out when it is not shown.
    pub fn from_record(r: &TickRecord, show_belief: bool) -> Self {
        Self {
            schema_version: PROTOCOL_VERSION,
            t: r.t,
            s: r.s.position().as_slice().to_vec(),
            alpha: r.alpha,
            a_b: r.a_b.delta().as_slice().to_vec(),
            belief: show_belief.then(|| {
                r.belief.rounded(BELIEF_DECIMALS).into_iter().map(|(id, p)| (id.0, p)).collect()
            }),
            status: status_name(&r.status).to_owned(),
        }
    }
}

pub fn status_name(t: &Termination) -> &'static str {
    match t {
        Termination::Running => "running",
        Termination::Reached(_) => "reached",
        Termination::Timeout => "timeout",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndFrame {
    pub schema_version: u32,
    /// `reached`, `timeout` or `aborted`.
    pub outcome: String,
    pub metrics: EpisodeMetrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorFrame {
    pub schema_version: u32,
    pub code: String,
    pub message: String,
}

impl From<&SessionError> for ErrorFrame {
    fn from(e: &SessionError) -> Self {
        Self { schema_version: PROTOCOL_VERSION, code: e.code().to_owned(), message: e.to_string() }
    }
}

/// Sent once when a client connects.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionFrame {
    pub schema_version: u32,
    pub session_id: String,
    pub status: String,
    pub communication_shown: bool,
    pub scenario: PublicScenario,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerFrame {
    Session(SessionFrame),
    Tick(TickFrame),
    End(EndFrame),
    Error(ErrorFrame),
}

impl ServerFrame {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("frames serialize")
    }
}

/// A scenario as a client may see it: the operator's own goals are not sent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublicScenario {
    pub schema_version: u32,
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub start: Vec<f64>,
    /// Goal set of each stage, in order.
    pub stages: Vec<Vec<Goal>>,
    pub v_max: f64,
    pub goal_radius: f64,
    pub t_max: u64,
    pub tick_dt: f64,
}

impl From<&Scenario> for PublicScenario {
    fn from(sc: &Scenario) -> Self {
        Self {
            schema_version: sc.schema_version,
            id: sc.id.clone(),
            description: sc.description.clone(),
            start: sc.start.position().as_slice().to_vec(),
            stages: sc.stages().into_iter().map(|s| s.goals).collect(),
            v_max: sc.v_max,
            goal_radius: sc.goal_radius,
            t_max: sc.t_max,
            tick_dt: sc.tick_dt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub id: String,
    pub description: String,
    pub dim: usize,
    pub num_stages: usize,
}
