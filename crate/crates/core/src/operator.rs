//! Simulated operators.
//!
//! The Boltzmann operators score each candidate input by what it changes in
//! the executed motion: the blended step with the input against the blended
//! step the robot would take anyway. With no assistance (`alpha = 0`) this is
//! exactly the plain progress-plus-effort cost. The effort weight is the
//! displayed belief in the operator's goal for the communication-aware
//! operator. The blind operator cannot read the belief and weights effort
//! by the uninformed estimate `1/k`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arbitration::blend;
use crate::config::HumanKind;
use crate::engine::Observation;
use crate::env::{distance, ControlAction};
use crate::error::{Error, Result};
use crate::human::{sample_boltzmann, Rationality};

pub trait Operator {
    fn act(&mut self, obs: &Observation<'_>) -> Result<ControlAction>;
}

/// Cost of input `a` given the assistance the operator can see coming.
pub fn assisted_cost(obs: &Observation<'_>, a: &ControlAction, effort_weight: f64) -> Result<f64> {
    let s = obs.state.position();
    let goal = obs.intent.position;
    let silent = blend(&ControlAction::zero(s.dim()), &obs.assist, obs.alpha, obs.v_max)?;
    let with_input = blend(a, &obs.assist, obs.alpha, obs.v_max)?;
    Ok(distance(s + with_input.delta(), goal) - distance(s + silent.delta(), goal) + effort_weight * a.magnitude())
}

#[derive(Clone, Debug)]
pub struct BoltzmannOperator {
    aware: bool,
    beta: Rationality,
    rng: ChaCha8Rng,
}

impl BoltzmannOperator {
    pub fn comm_aware(beta: Rationality, seed: u64) -> Self {
        Self { aware: true, beta, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn comm_blind(beta: Rationality, seed: u64) -> Self {
        Self { aware: false, beta, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn effort_weight(&self, obs: &Observation<'_>) -> Result<f64> {
        if !self.aware {
            return Ok(1.0 / obs.goals.len() as f64);
        }
        let shown = obs
            .displayed_belief
            .ok_or_else(|| Error::InvalidConfig("communication-aware operator needs the belief display".into()))?;
        shown.probability(&obs.intent.id).ok_or_else(|| Error::UnknownGoal(obs.intent.id.to_string()))
    }
}

impl Operator for BoltzmannOperator {
    fn act(&mut self, obs: &Observation<'_>) -> Result<ControlAction> {
        let w = self.effort_weight(obs)?;
        let costs = obs
            .candidates
            .iter()
            .map(|a| assisted_cost(obs, a, w))
            .collect::<Result<Vec<_>>>()?;
        let i = sample_boltzmann(&costs, self.beta, &mut self.rng)?;
        Ok(obs.candidates[i])
    }
}

/// Moves straight at the goal at full speed, stopping on it when closer
/// than one step. This minimizes the next-state distance over all inputs
/// within `v_max`.
#[derive(Clone, Copy, Debug, Default)]
pub struct OptimalOperator;

impl Operator for OptimalOperator {
    fn act(&mut self, obs: &Observation<'_>) -> Result<ControlAction> {
        let toward = obs.intent.position - obs.state.position();
        Ok(ControlAction(toward).clipped(obs.v_max))
    }
}

/// Replays recorded inputs, then stays silent.
#[derive(Clone, Debug)]
pub struct ScriptedOperator {
    inputs: Vec<ControlAction>,
    next: usize,
}

impl ScriptedOperator {
    pub fn new(inputs: Vec<ControlAction>) -> Self {
        Self { inputs, next: 0 }
    }
}

impl Operator for ScriptedOperator {
    fn act(&mut self, obs: &Observation<'_>) -> Result<ControlAction> {
        let a = self.inputs.get(self.next).copied().unwrap_or_else(|| ControlAction::zero(obs.state.dim()));
        self.next += 1;
        Ok(a)
    }
}

/// Builds the operator for a simulated kind. Scripted operators need inputs
/// and are constructed directly.
pub fn operator_for(kind: HumanKind, beta: Rationality, seed: u64) -> Result<Box<dyn Operator + Send>> {
    Ok(match kind {
        HumanKind::CommAware => Box::new(BoltzmannOperator::comm_aware(beta, seed)),
        HumanKind::CommBlind => Box::new(BoltzmannOperator::comm_blind(beta, seed)),
        HumanKind::Optimal => Box::new(OptimalOperator),
        HumanKind::Scripted | HumanKind::Live => {
            return Err(Error::InvalidConfig(format!("no simulated operator for {kind:?}")))
        }
    })
}
