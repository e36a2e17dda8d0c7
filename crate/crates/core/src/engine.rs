//! The per-tick shared-autonomy controller.
//!
//! One tick takes the operator's input, updates the belief, ramps authority,
//! blends the assistance with the input and integrates the result. The
//! simulation harness and the live session service both drive this type, so
//! a recorded input sequence replays to the same states.

use serde::{Deserialize, Serialize};

use crate::arbitration::{assist_action, blend, AlphaSchedule};
use crate::belief::{Belief, UpdateParams};
use crate::config::EngineConfig;
use crate::env::{dist, step, ControlAction, Goal, GoalId, Scenario, Stage, Termination, WorkspaceState};
use crate::error::{Error, Result};
use crate::human::{candidate_actions, CostContext, CostMode};

/// Everything that happened in one tick, as logged and streamed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub t: u64,
    pub stage: usize,
    pub a_h: ControlAction,
    pub a_r: ControlAction,
    pub a_b: ControlAction,
    /// Posterior after this tick's input.
    pub belief: Belief,
    pub alpha: f64,
    /// State after integrating `a_b`.
    pub s: WorkspaceState,
    pub status: Termination,
}

/// What an operator can perceive before acting.
#[derive(Clone, Copy, Debug)]
pub struct Observation<'a> {
    pub t: u64,
    pub state: &'a WorkspaceState,
    pub goals: &'a [Goal],
    /// The operator's own goal for the current stage.
    pub intent: &'a Goal,
    /// Present only when the belief is on display.
    pub displayed_belief: Option<&'a Belief>,
    /// The robot's own pull under the current belief, before blending.
    pub assist: ControlAction,
    pub alpha: f64,
    pub v_max: f64,
    pub candidates: &'a [ControlAction],
}

#[derive(Clone, Debug)]
pub struct Controller {
    scenario: Scenario,
    config: EngineConfig,
    stages: Vec<Stage>,
    stage: usize,
    state: WorkspaceState,
    belief: Belief,
    schedule: AlphaSchedule,
    t: u64,
    status: Termination,
    candidates: Vec<ControlAction>,
}

impl Controller {
    pub fn new(scenario: Scenario, config: EngineConfig) -> Result<Self> {
        scenario.validate()?;
        config.validate_for(&scenario)?;
        let stages = scenario.stages();
        let belief = Belief::uniform_prior(&stages[0].goals)?;
        let schedule = config.schedule_for(scenario.v_max)?;
        let candidates = candidate_actions(scenario.dim(), scenario.v_max);
        let mut c = Self {
            state: scenario.start,
            scenario,
            config,
            stages,
            stage: 0,
            belief,
            schedule,
            t: 0,
            status: Termination::Running,
            candidates,
        };
        c.settle()?;
        Ok(c)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn state(&self) -> &WorkspaceState {
        &self.state
    }

    pub fn belief(&self) -> &Belief {
        &self.belief
    }

    pub fn alpha(&self) -> f64 {
        self.schedule.alpha
    }

    pub fn schedule(&self) -> &AlphaSchedule {
        &self.schedule
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn stage_index(&self) -> usize {
        self.stage
    }

    pub fn stage(&self) -> &Stage {
        &self.stages[self.stage]
    }

    pub fn status(&self) -> &Termination {
        &self.status
    }

    pub fn is_running(&self) -> bool {
        self.status == Termination::Running
    }

    pub fn candidates(&self) -> &[ControlAction] {
        &self.candidates
    }

    pub fn is_silent(&self, a_h: &ControlAction) -> bool {
        self.schedule.is_silent(a_h)
    }

    /// Assistance from the current belief, before any new input.
    pub fn current_assist(&self) -> Result<ControlAction> {
        assist_action(&self.belief, &self.state, &self.stage().goals, self.scenario.v_max)
    }

    pub fn observation(&self) -> Result<Observation<'_>> {
        let stage = self.stage();
        Ok(Observation {
            t: self.t,
            state: &self.state,
            goals: &stage.goals,
            intent: stage.true_goal(),
            displayed_belief: self.config.communication_shown.then_some(&self.belief),
            assist: self.current_assist()?,
            alpha: self.schedule.alpha,
            v_max: self.scenario.v_max,
            candidates: &self.candidates,
        })
    }

    /// Advances one tick with the operator's input (clipped to `v_max`).
    pub fn tick(&mut self, a_h: ControlAction) -> Result<TickRecord> {
        if !self.is_running() {
            return Err(Error::NotRunning);
        }
        a_h.delta().ensure_dim(self.state.dim())?;
        if !a_h.delta().is_finite() {
            return Err(Error::NonFinite("action"));
        }
        let v_max = self.scenario.v_max;
        let a_h = a_h.clipped(v_max);

        // The likelihood reads the belief that was on display when the input was issued.
        let shown = self.belief.clone();
        let ctx = match self.config.inference_mode {
            CostMode::NoComm => CostContext::NoComm,
            CostMode::Comm => CostContext::Comm(&shown),
        };
        let params = UpdateParams { beta: self.config.beta, p_floor: self.config.p_floor, action_set: &self.candidates };
        let goals = &self.stages[self.stage].goals;
        self.belief = shown.update(goals, &self.state, &a_h, ctx, &params)?;
        self.schedule = self.schedule.update(&a_h);

        let a_r = assist_action(&self.belief, &self.state, goals, v_max)?;
        let a_b = blend(&a_h, &a_r, self.schedule.alpha, v_max)?;
        self.state = step(&self.state, &a_b)?;

        let record_stage = self.stage;
        let record_belief = self.belief.clone();
        let record_alpha = self.schedule.alpha;
        self.t += 1;
        self.settle()?;

        Ok(TickRecord {
            t: self.t - 1,
            stage: record_stage,
            a_h,
            a_r,
            a_b,
            belief: record_belief,
            alpha: record_alpha,
            s: self.state,
            status: self.status.clone(),
        })
    }

    /// Advances through reached stages and sets the termination status.
    fn settle(&mut self) -> Result<()> {
        loop {
            let goal = self.stages[self.stage].true_goal();
            if dist(&self.state, goal)? > self.scenario.goal_radius {
                break;
            }
            if self.stage + 1 == self.stages.len() {
                self.status = Termination::Reached(goal.id.clone());
                return Ok(());
            }
            self.stage += 1;
            self.belief = Belief::uniform_prior(&self.stages[self.stage].goals)?;
            self.schedule.alpha = self.schedule.alpha_min;
        }
        if self.t >= self.scenario.t_max {
            self.status = Termination::Timeout;
        }
        Ok(())
    }

    pub fn final_goal(&self) -> &GoalId {
        &self.stages[self.stages.len() - 1].true_goal_id
    }
}
