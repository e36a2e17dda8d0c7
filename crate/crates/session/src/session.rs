//! One operator session as a plain state machine.
//!
//! The server drives it from a timer; tests drive it tick by tick.

use commshare_core::sim::{EpisodeLog, LogHeader, LOG_SCHEMA_VERSION};
use commshare_core::{ControlAction, Controller, EngineConfig, HumanKind, Scenario, Termination};
use serde::{Deserialize, Serialize};

use crate::error::SessionError;
use crate::protocol::{
    status_name, EndFrame, InputEvent, ServerFrame, SessionFrame, TickFrame, PROTOCOL_VERSION,
};

/// Inputs are held for this many ticks after the tick they arrived for.
pub const INPUT_HOLD_TICKS: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Lobby,
    Running,
    Finished,
}

impl SessionStatus {
    pub fn name(self) -> &'static str {
        match self {
            SessionStatus::Lobby => "lobby",
            SessionStatus::Running => "running",
            SessionStatus::Finished => "finished",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct HeldInput {
    action: ControlAction,
    /// Tick index the input was first eligible for.
    since: u64,
}

#[derive(Debug)]
pub struct Session {
    id: String,
    scenario: Scenario,
    config: EngineConfig,
    controller: Controller,
    status: SessionStatus,
    held: Option<HeldInput>,
    log: EpisodeLog,
    run: u32,
    /// Set once the current run's log has been handed out.
    flushed: bool,
}

impl Session {
    pub fn new(id: impl Into<String>, scenario: Scenario, config: EngineConfig) -> Result<Self, SessionError> {
        let controller = Controller::new(scenario.clone(), config.clone()).map_err(|e| match e {
            commshare_core::Error::InvalidConfig(m) => SessionError::ConfigInvalid(m),
            other => SessionError::Engine(other),
        })?;
        let id = id.into();
        let log = new_log(&id, &scenario, &config);
        Ok(Self { id, scenario, config, controller, status: SessionStatus::Lobby, held: None, log, run: 0, flushed: false })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn controller(&self) -> &Controller {
        &self.controller
    }

    /// Index of the current run; `reset` starts a new one.
    pub fn run(&self) -> u32 {
        self.run
    }

    pub fn log(&self) -> &EpisodeLog {
        &self.log
    }

    pub fn is_running(&self) -> bool {
        self.status == SessionStatus::Running
    }

    pub fn hello(&self) -> ServerFrame {
        ServerFrame::Session(SessionFrame {
            schema_version: PROTOCOL_VERSION,
            session_id: self.id.clone(),
            status: self.status.name().to_owned(),
            communication_shown: self.config.communication_shown,
            scenario: (&self.scenario).into(),
        })
    }

    pub fn start(&mut self) -> Result<(), SessionError> {
        match self.status {
            SessionStatus::Finished => Err(SessionError::SessionFinished),
            _ => {
                self.status = SessionStatus::Running;
                Ok(())
            }
        }
    }

    /// Stores the latest input, scaled to `v_max`. Later inputs replace
    /// earlier ones.
    pub fn submit_input(&mut self, ev: &InputEvent) -> Result<(), SessionError> {
        match self.status {
            SessionStatus::Finished => return Err(SessionError::SessionFinished),
            SessionStatus::Lobby => return Err(SessionError::NotRunning),
            SessionStatus::Running => {}
        }
        ev.validate()?;
        let v = self.scenario.v_max;
        let coords = [ev.dx * v, ev.dy * v, ev.dz * v];
        let action = ControlAction::new(&coords[..self.scenario.dim()])?.clipped(v);
        self.held = Some(HeldInput { action, since: self.controller.t() });
        Ok(())
    }

    /// The input the next tick will use.
    pub fn current_input(&self) -> ControlAction {
        let t = self.controller.t();
        match self.held {
            Some(h) if t - h.since <= INPUT_HOLD_TICKS => h.action,
            _ => ControlAction::zero(self.scenario.dim()),
        }
    }

    /// Runs one control tick. Returns the tick frame, followed by the end
    /// frame when the episode finishes.
    pub fn tick(&mut self) -> Result<Vec<ServerFrame>, SessionError> {
        if !self.is_running() {
            return Err(if self.status == SessionStatus::Finished {
                SessionError::SessionFinished
            } else {
                SessionError::NotRunning
            });
        }
        let record = self.controller.tick(self.current_input())?;
        let mut frames = vec![ServerFrame::Tick(TickFrame::from_record(&record, self.config.communication_shown))];
        let outcome = match &record.status {
            Termination::Running => None,
            other => Some(status_name(other)),
        };
        self.log.records.push(record);
        if let Some(outcome) = outcome {
            self.status = SessionStatus::Finished;
            self.held = None;
            frames.push(self.end_frame(outcome));
        }
        Ok(frames)
    }

    fn end_frame(&self, outcome: &str) -> ServerFrame {
        ServerFrame::End(EndFrame {
            schema_version: PROTOCOL_VERSION,
            outcome: outcome.to_owned(),
            metrics: self.log.metrics(),
        })
    }

    /// Stops a live run early. Returns the end frame when there was a run to stop.
    pub fn abort(&mut self) -> Option<ServerFrame> {
        if self.status != SessionStatus::Running {
            return None;
        }
        self.status = SessionStatus::Finished;
        self.held = None;
        Some(self.end_frame("aborted"))
    }

    /// Starts over in the lobby with a fresh engine. An unfinished run is
    /// aborted and its log returned for flushing.
    pub fn reset(&mut self) -> Result<Option<(u32, EpisodeLog)>, SessionError> {
        self.abort();
        let previous = self.take_finished_log();
        self.controller = Controller::new(self.scenario.clone(), self.config.clone())?;
        self.log = new_log(&self.id, &self.scenario, &self.config);
        self.status = SessionStatus::Lobby;
        self.held = None;
        self.run += 1;
        self.flushed = false;
        Ok(previous)
    }

    /// The log of the finished run, once. Runs that never ticked have no log.
    pub fn take_finished_log(&mut self) -> Option<(u32, EpisodeLog)> {
        if self.status != SessionStatus::Finished || self.flushed || self.log.records.is_empty() {
            return None;
        }
        self.flushed = true;
        Some((self.run, self.log.clone()))
    }
}

fn new_log(id: &str, scenario: &Scenario, config: &EngineConfig) -> EpisodeLog {
    EpisodeLog::new(LogHeader {
        schema_version: LOG_SCHEMA_VERSION,
        scenario: scenario.clone(),
        config: config.clone(),
        seed: config.seed,
        human: HumanKind::Live,
        condition: None,
        session_id: Some(id.to_owned()),
    })
}
