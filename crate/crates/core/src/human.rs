//! Human cost-value functions and the Boltzmann action model.
//!
//! Two costs are provided. Without communication the operator trades
//! progress against raw effort. When the robot's belief is on display,
//! effort toward a goal is weighted by how strongly the robot already
//! believes in that goal: agreeing costs effort, rebutting a wrong belief
//! is cheap.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::env::{distance, ControlAction, Goal, WorkspaceState};
use crate::error::{Error, Result};

pub const DEFAULT_BETA: f64 = 5.0;

/// Inverse temperature of the Boltzmann model.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Rationality(f64);

impl Rationality {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta >= 0.0 {
            Ok(Self(beta))
        } else {
            Err(Error::InvalidRationality(beta))
        }
    }

    pub fn beta(self) -> f64 {
        self.0
    }
}

impl Default for Rationality {
    fn default() -> Self {
        Self(DEFAULT_BETA)
    }
}

impl TryFrom<f64> for Rationality {
    type Error = Error;

    fn try_from(beta: f64) -> Result<Self> {
        Self::new(beta)
    }
}

impl From<Rationality> for f64 {
    fn from(r: Rationality) -> f64 {
        r.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    NoComm,
    Comm,
}

/// Selects the cost function; the communicated variant carries the belief
/// that was on display.
#[derive(Clone, Copy, Debug)]
pub enum CostContext<'a> {
    NoComm,
    Comm(&'a Belief),
}

impl CostContext<'_> {
    pub fn mode(&self) -> CostMode {
        match self {
            CostContext::NoComm => CostMode::NoComm,
            CostContext::Comm(_) => CostMode::Comm,
        }
    }
}

fn check_dims(s: &WorkspaceState, a: &ControlAction, g: &Goal) -> Result<()> {
    a.delta().ensure_dim(s.dim())?;
    g.position.ensure_dim(s.dim())
}

/// Progress plus weighted effort: `dist(s + a, g) - dist(s, g) + w * |a|`.
fn weighted_cost(s: &WorkspaceState, a: &ControlAction, g: &Goal, effort_weight: f64) -> f64 {
    let p = s.position();
    distance(p + a.delta(), g.position) - distance(p, g.position) + effort_weight * a.magnitude()
}

pub fn q_no_comm(s: &WorkspaceState, a_h: &ControlAction, g: &Goal) -> Result<f64> {
    check_dims(s, a_h, g)?;
    Ok(weighted_cost(s, a_h, g, 1.0))
}

pub fn q_comm(s: &WorkspaceState, a_h: &ControlAction, g: &Goal, b: &Belief) -> Result<f64> {
    check_dims(s, a_h, g)?;
    let weight = b.probability(&g.id).ok_or_else(|| Error::UnknownGoal(g.id.to_string()))?;
    Ok(weighted_cost(s, a_h, g, weight))
}

pub fn cost(s: &WorkspaceState, a_h: &ControlAction, g: &Goal, ctx: CostContext<'_>) -> Result<f64> {
    match ctx {
        CostContext::NoComm => q_no_comm(s, a_h, g),
        CostContext::Comm(b) => q_comm(s, a_h, g, b),
    }
}

/// Unnormalized log-likelihood `-beta * Q`.
pub fn log_likelihood(
    s: &WorkspaceState,
    a_h: &ControlAction,
    g: &Goal,
    ctx: CostContext<'_>,
    beta: Rationality,
) -> Result<f64> {
    let q = cost(s, a_h, g, ctx)?;
    // beta == 0 must give exactly 0 even when q is large.
    Ok(if beta.0 == 0.0 { 0.0 } else { -beta.0 * q })
}

/// `exp(-beta * Q)`; strictly positive unless the exponent underflows.
pub fn action_likelihood(
    s: &WorkspaceState,
    a_h: &ControlAction,
    g: &Goal,
    ctx: CostContext<'_>,
    beta: Rationality,
) -> Result<f64> {
    log_likelihood(s, a_h, g, ctx, beta).map(f64::exp)
}

/// Log of the per-goal normalizer `sum_a exp(-beta * Q(s, a, g))` over a
/// finite action set.
pub fn log_partition(
    s: &WorkspaceState,
    g: &Goal,
    ctx: CostContext<'_>,
    beta: Rationality,
    actions: &[ControlAction],
) -> Result<f64> {
    if actions.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let logs = actions
        .iter()
        .map(|a| log_likelihood(s, a, g, ctx, beta))
        .collect::<Result<Vec<_>>>()?;
    Ok(log_sum_exp(&logs))
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Zero action followed by unit directions of the `{-1,0,1}^n` lattice
/// scaled to half and full `v_max`: 17 actions in 2-D, 53 in 3-D.
pub fn candidate_actions(dim: usize, v_max: f64) -> Vec<ControlAction> {
    let mut out = vec![ControlAction::zero(dim)];
    let lattice = 3usize.pow(dim as u32);
    for code in 0..lattice {
        let mut coords = [0.0; 3];
        let mut c = code;
        for x in coords.iter_mut().take(dim) {
            *x = (c % 3) as f64 - 1.0;
            c /= 3;
        }
        let dir = crate::vector::Vector::new(&coords[..dim]).expect("dim in range");
        if dir.is_zero() {
            continue;
        }
        let unit = dir * (1.0 / dir.norm());
        for scale in [0.5, 1.0] {
            out.push(ControlAction(unit * (scale * v_max)));
        }
    }
    out
}

/// Draws an index with probability proportional to `exp(-beta * cost)`.
///
/// Weights are taken relative to the minimum cost so large `beta` cannot
/// overflow; exactly tied minima stay exactly tied.
pub fn sample_boltzmann<R: Rng + ?Sized>(costs: &[f64], beta: Rationality, rng: &mut R) -> Result<usize> {
    if costs.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = costs
        .iter()
        .map(|&q| if beta.0 == 0.0 { 1.0 } else { (-beta.0 * (q - min)).exp() })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return Ok(i);
        }
        u -= w;
    }
    // Rounding left a sliver past the last bin; fall back to the last positive weight.
    Ok(weights.iter().rposition(|w| *w > 0.0).unwrap_or(weights.len() - 1))
}

/// Samples a simulated operator action from the Boltzmann distribution over
/// a finite candidate set.
pub fn simulate_human<R: Rng + ?Sized>(
    s: &WorkspaceState,
    true_goal: &Goal,
    ctx: CostContext<'_>,
    beta: Rationality,
    candidates: &[ControlAction],
    rng: &mut R,
) -> Result<ControlAction> {
    let costs = candidates
        .iter()
        .map(|a| cost(s, a, true_goal, ctx))
        .collect::<Result<Vec<_>>>()?;
    let i = sample_boltzmann(&costs, beta, rng)?;
    Ok(candidates[i])
}
