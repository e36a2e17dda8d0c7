use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arbitration::{
    AlphaSchedule, DEFAULT_ALPHA_MAX, DEFAULT_ALPHA_MIN, DEFAULT_ALPHA_STEP, DEFAULT_INPUT_EPSILON_RATIO,
};
use crate::belief::DEFAULT_P_FLOOR;
use crate::env::Scenario;
use crate::error::{Error, Result};
use crate::human::{CostMode, Rationality};

/// Engine knobs for one episode or session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub inference_mode: CostMode,
    pub communication_shown: bool,
    pub beta: Rationality,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    /// Absolute silence threshold; `None` means 5% of the scenario's `v_max`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_epsilon: Option<f64>,
    pub p_floor: f64,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            inference_mode: CostMode::Comm,
            communication_shown: true,
            beta: Rationality::default(),
            alpha_min: DEFAULT_ALPHA_MIN,
            alpha_max: DEFAULT_ALPHA_MAX,
            alpha_step: DEFAULT_ALPHA_STEP,
            input_epsilon: None,
            p_floor: DEFAULT_P_FLOOR,
            seed: 0,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.inference_mode == CostMode::Comm && !self.communication_shown {
            return Err(Error::InvalidConfig(
                "communication-aware inference requires communication_shown".into(),
            ));
        }
        if !(self.p_floor.is_finite() && (0.0..0.5).contains(&self.p_floor)) {
            return Err(Error::InvalidConfig(format!("p_floor {} must be in [0, 0.5)", self.p_floor)));
        }
        if let Some(eps) = self.input_epsilon {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::InvalidConfig(format!("input_epsilon {eps} must be >= 0")));
            }
        }
        AlphaSchedule::new(self.alpha_min, self.alpha_max, self.alpha_step, 0.0).map(|_| ())
    }

    /// Checks the config against a scenario; the floor must leave room for
    /// a normalized belief over the largest goal set.
    pub fn validate_for(&self, scenario: &Scenario) -> Result<()> {
        self.validate()?;
        let k = scenario.stages().iter().map(|s| s.goals.len()).max().unwrap_or(1);
        if self.p_floor * k as f64 > 1.0 {
            return Err(Error::InvalidConfig(format!("p_floor {} too large for {k} goals", self.p_floor)));
        }
        Ok(())
    }

    pub fn input_epsilon_for(&self, v_max: f64) -> f64 {
        self.input_epsilon.unwrap_or(DEFAULT_INPUT_EPSILON_RATIO * v_max)
    }

    pub fn schedule_for(&self, v_max: f64) -> Result<AlphaSchedule> {
        AlphaSchedule::new(self.alpha_min, self.alpha_max, self.alpha_step, self.input_epsilon_for(v_max))
    }
}

/// Simulated operator population.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanKind {
    /// Reads the displayed belief; Boltzmann over the communicated cost.
    CommAware,
    /// Sees only the robot's motion.
    CommBlind,
    /// Always takes the candidate that gets closest to the goal.
    Optimal,
    /// Replays a fixed input sequence.
    Scripted,
    /// A person at the operator console.
    Live,
}

impl HumanKind {
    pub fn needs_display(self) -> bool {
        self == HumanKind::CommAware
    }
}

/// The three experimental conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Belief hidden, baseline inference, operator sees only motion.
    Without,
    /// Belief displayed, baseline inference.
    With,
    /// Belief displayed, communication-aware inference.
    Ours,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Without, Condition::With, Condition::Ours];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Without => "without",
            Condition::With => "with",
            Condition::Ours => "ours",
        }
    }

    /// Engine config and operator for this condition, other knobs from `base`.
    pub fn arm(self, base: &EngineConfig) -> (EngineConfig, HumanKind) {
        let (mode, shown, human) = match self {
            Condition::Without => (CostMode::NoComm, false, HumanKind::CommBlind),
            Condition::With => (CostMode::NoComm, true, HumanKind::CommAware),
            Condition::Ours => (CostMode::Comm, true, HumanKind::CommAware),
        };
        (EngineConfig { inference_mode: mode, communication_shown: shown, ..base.clone() }, human)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "without" => Ok(Condition::Without),
            "with" => Ok(Condition::With),
            "ours" => Ok(Condition::Ours),
            other => Err(Error::InvalidConfig(format!("unknown condition {other:?}"))),
        }
    }
}
