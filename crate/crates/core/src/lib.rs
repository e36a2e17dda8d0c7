//! Shared-autonomy engine with communication-aware goal inference.
//!
//! The robot keeps a belief over which goal the operator is reaching for,
//! blends its own assistance with the operator's input, and can show that
//! belief back to the operator. When the belief is on display, the inference
//! accounts for the fact that the operator is reacting to it.

pub mod arbitration;
pub mod belief;
pub mod config;
pub mod engine;
pub mod env;
pub mod error;
pub mod human;
pub mod library;
pub mod operator;
pub mod sim;
pub mod vector;

pub use arbitration::{assist_action, blend, AlphaSchedule};
pub use belief::{Belief, UpdateParams};
pub use config::{Condition, EngineConfig, HumanKind};
pub use engine::{Controller, Observation, TickRecord};
pub use env::{dist, step, ControlAction, Goal, GoalId, Scenario, Stage, Termination, WorkspaceState};
pub use error::{Error, Result};
pub use human::{CostContext, CostMode, Rationality};
pub use operator::{BoltzmannOperator, OptimalOperator, Operator, ScriptedOperator};
pub use sim::{replay, run_batch, run_episode, EpisodeLog, EpisodeMetrics, ReplayOutcome};
pub use vector::Vector;
