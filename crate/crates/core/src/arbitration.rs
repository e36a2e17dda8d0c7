//! Assistance, blending and the control-authority schedule.

use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::env::{ControlAction, Goal, WorkspaceState};
use crate::error::{Error, Result};
use crate::vector::Vector;

pub const DEFAULT_ALPHA_MIN: f64 = 0.2;
pub const DEFAULT_ALPHA_MAX: f64 = 0.9;
pub const DEFAULT_ALPHA_STEP: f64 = 0.02;
/// Silence threshold as a fraction of `v_max`.
pub const DEFAULT_INPUT_EPSILON_RATIO: f64 = 0.05;

/// Robot authority `alpha` with its bounds and per-tick ramp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaSchedule {
    pub alpha: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub step: f64,
    pub input_epsilon: f64,
}

impl AlphaSchedule {
    /// Starts at `alpha_min`.
    pub fn new(alpha_min: f64, alpha_max: f64, step: f64, input_epsilon: f64) -> Result<Self> {
        let sched = Self { alpha: alpha_min, alpha_min, alpha_max, step, input_epsilon };
        sched.validate()?;
        Ok(sched)
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
        if !in_unit(self.alpha_min) || !in_unit(self.alpha_max) || self.alpha_min > self.alpha_max {
            return Err(Error::InvalidConfig(format!(
                "alpha bounds [{}, {}] must satisfy 0 <= min <= max <= 1",
                self.alpha_min, self.alpha_max
            )));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidConfig(format!("alpha step {} must be > 0", self.step)));
        }
        if !(self.input_epsilon.is_finite() && self.input_epsilon >= 0.0) {
            return Err(Error::InvalidConfig(format!("input_epsilon {} must be >= 0", self.input_epsilon)));
        }
        if !(self.alpha >= self.alpha_min && self.alpha <= self.alpha_max) {
            return Err(Error::InvalidConfig(format!("alpha {} outside its bounds", self.alpha)));
        }
        Ok(())
    }

    pub fn is_silent(&self, a_h: &ControlAction) -> bool {
        a_h.magnitude() <= self.input_epsilon
    }

    /// Ramps authority up on silent ticks and down on active ones.
    pub fn update(self, a_h: &ControlAction) -> Self {
        let alpha = if self.is_silent(a_h) {
            (self.alpha + self.step).min(self.alpha_max)
        } else {
            (self.alpha - self.step).max(self.alpha_min)
        };
        Self { alpha, ..self }
    }
}

/// Belief-weighted pull toward the goals, capped at `v_max`.
pub fn assist_action(b: &Belief, s: &WorkspaceState, goals: &[Goal], v_max: f64) -> Result<ControlAction> {
    let mut raw = Vector::zeros(s.dim());
    for g in goals {
        g.position.ensure_dim(s.dim())?;
        let p = b.probability(&g.id).ok_or_else(|| Error::UnknownGoal(g.id.to_string()))?;
        raw = raw + (g.position - s.position()) * p;
    }
    Ok(ControlAction(raw).clipped(v_max))
}

/// `(1 - alpha) * a_h + alpha * a_r`, capped at `v_max`.
pub fn blend(a_h: &ControlAction, a_r: &ControlAction, alpha: f64, v_max: f64) -> Result<ControlAction> {
    a_r.delta().ensure_dim(a_h.dim())?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} outside [0, 1]")));
    }
    // The endpoints are returned untouched so the limits hold bit for bit.
    let mixed = if alpha == 0.0 {
        *a_h
    } else if alpha == 1.0 {
        *a_r
    } else {
        ControlAction(a_h.delta() * (1.0 - alpha) + a_r.delta() * alpha)
    };
    Ok(mixed.clipped(v_max))
}
