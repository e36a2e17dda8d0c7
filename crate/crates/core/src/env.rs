//! Workspace, goals and the discrete-time transition.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TICK_DT: f64 = 0.02;

/// End-effector position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WorkspaceState(pub Vector);

impl WorkspaceState {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let v = Vector::new(coords)?;
        if !v.is_finite() {
            return Err(Error::NonFinite("state"));
        }
        Ok(Self(v))
    }

    pub fn position(&self) -> Vector {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Displacement per tick. Used for human input, robot assistance and the blend.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ControlAction(pub Vector);

impl ControlAction {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let v = Vector::new(coords)?;
        if !v.is_finite() {
            return Err(Error::NonFinite("action"));
        }
        Ok(Self(v))
    }

    pub fn zero(dim: usize) -> Self {
        Self(Vector::zeros(dim))
    }

    pub fn delta(&self) -> Vector {
        self.0
    }

    pub fn magnitude(&self) -> f64 {
        self.0.norm()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Caps the magnitude at `v_max`, preserving direction.
    pub fn clipped(self, v_max: f64) -> Self {
        Self(self.0.clip_norm(v_max))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GoalId(pub String);

impl GoalId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GoalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for GoalId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Goal {
    pub id: GoalId,
    pub position: Vector,
}

impl Goal {
    pub fn new(id: impl Into<String>, coords: &[f64]) -> Result<Self> {
        let position = Vector::new(coords)?;
        if !position.is_finite() {
            return Err(Error::NonFinite("goal"));
        }
        Ok(Self { id: GoalId::new(id), position })
    }
}

/// Applies the blended action to the state.
pub fn step(s: &WorkspaceState, blended: &ControlAction) -> Result<WorkspaceState> {
    blended.0.ensure_dim(s.dim())?;
    let next = s.0 + blended.0;
    if !next.is_finite() {
        return Err(Error::NonFinite("state"));
    }
    Ok(WorkspaceState(next))
}

/// Euclidean distance from the end effector to a goal.
pub fn dist(s: &WorkspaceState, g: &Goal) -> Result<f64> {
    g.position.ensure_dim(s.dim())?;
    Ok(distance(s.0, g.position))
}

pub(crate) fn distance(a: Vector, b: Vector) -> f64 {
    (b - a).norm()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "goal_id", rename_all = "snake_case")]
pub enum Termination {
    Reached(GoalId),
    Timeout,
    Running,
}

/// One reach sub-task: a goal set and the goal the operator is after.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub goals: Vec<Goal>,
    pub true_goal_id: GoalId,
}

impl Stage {
    pub fn true_goal(&self) -> &Goal {
        self.goals
            .iter()
            .find(|g| g.id == self.true_goal_id)
            .expect("validated stage holds its true goal")
    }

    fn validate(&self, dim: usize, label: &str) -> Result<()> {
        if self.goals.is_empty() {
            return Err(Error::InvalidScenario(format!("{label}: goal set is empty")));
        }
        let mut seen = HashSet::new();
        for g in &self.goals {
            if g.position.dim() != dim {
                return Err(Error::InvalidScenario(format!(
                    "{label}: goal {} has dimension {}, expected {dim}",
                    g.id,
                    g.position.dim()
                )));
            }
            if !g.position.is_finite() {
                return Err(Error::InvalidScenario(format!("{label}: goal {} is not finite", g.id)));
            }
            if !seen.insert(&g.id) {
                return Err(Error::InvalidScenario(format!("{label}: duplicate goal id {}", g.id)));
            }
        }
        if !seen.contains(&self.true_goal_id) {
            return Err(Error::InvalidScenario(format!(
                "{label}: true_goal_id {} is not among the goals",
                self.true_goal_id
            )));
        }
        Ok(())
    }
}

fn default_tick_dt() -> f64 {
    DEFAULT_TICK_DT
}

/// Task layout. The top-level goal set is the first reach stage; `waypoints`
/// lists follow-up stages for multi-step tasks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub start: WorkspaceState,
    pub goals: Vec<Goal>,
    pub true_goal_id: GoalId,
    pub v_max: f64,
    pub goal_radius: f64,
    pub t_max: u64,
    #[serde(default = "default_tick_dt")]
    pub tick_dt: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub waypoints: Vec<Stage>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidScenario(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::InvalidScenario(m) => Error::InvalidScenario(format!("{}: {m}", path.display())),
            other => Error::InvalidScenario(format!("{}: {other}", path.display())),
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn dim(&self) -> usize {
        self.start.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(Error::InvalidScenario(format!(
                "unsupported schema_version {} (expected {SCENARIO_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.id.is_empty() {
            return Err(Error::InvalidScenario("id is empty".into()));
        }
        let dim = self.dim();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidScenario(format!("workspace dimension {dim} not in {{2,3}}")));
        }
        if !self.start.0.is_finite() {
            return Err(Error::InvalidScenario("start is not finite".into()));
        }
        for (name, value) in [("v_max", self.v_max), ("goal_radius", self.goal_radius), ("tick_dt", self.tick_dt)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidScenario(format!("{name} must be finite and > 0, got {value}")));
            }
        }
        if self.t_max == 0 {
            return Err(Error::InvalidScenario("t_max must be > 0".into()));
        }
        for (i, stage) in self.stages().iter().enumerate() {
            stage.validate(dim, &format!("stage {i}"))?;
        }
        Ok(())
    }

    pub fn num_stages(&self) -> usize {
        1 + self.waypoints.len()
    }

    pub fn stages(&self) -> Vec<Stage> {
        let mut out = Vec::with_capacity(self.num_stages());
        out.push(Stage { goals: self.goals.clone(), true_goal_id: self.true_goal_id.clone() });
        out.extend(self.waypoints.iter().cloned());
        out
    }

    pub fn true_goal(&self) -> &Goal {
        self.goals
            .iter()
            .find(|g| g.id == self.true_goal_id)
            .expect("validated scenario holds its true goal")
    }

    /// Termination against the first-stage true goal.
    pub fn is_terminal(&self, s: &WorkspaceState, t: u64) -> Result<Termination> {
        let goal = self.true_goal();
        if dist(s, goal)? <= self.goal_radius {
            Ok(Termination::Reached(goal.id.clone()))
        } else if t >= self.t_max {
            Ok(Termination::Timeout)
        } else {
            Ok(Termination::Running)
        }
    }
}
