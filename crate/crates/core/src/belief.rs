//! Posterior over the discrete goal set.

use serde::{Deserialize, Serialize};

use crate::env::{ControlAction, Goal, GoalId, WorkspaceState};
use crate::error::{Error, Result};
use crate::human::{log_likelihood, log_partition, CostContext, Rationality};

pub const DEFAULT_P_FLOOR: f64 = 1e-4;
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Normalized distribution over goals, kept in scenario goal order.
///
/// Serializes as ordered `[goal_id, probability]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(GoalId, f64)>", into = "Vec<(GoalId, f64)>")]
pub struct Belief {
    entries: Vec<(GoalId, f64)>,
}

impl Belief {
    pub fn from_entries(entries: Vec<(GoalId, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyGoalSet);
        }
        for (i, (id, p)) in entries.iter().enumerate() {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::InvalidBelief(format!("probability of {id} is {p}")));
            }
            if entries[..i].iter().any(|(other, _)| other == id) {
                return Err(Error::InvalidBelief(format!("duplicate goal {id}")));
            }
        }
        let total: f64 = entries.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidBelief(format!("probabilities sum to {total}")));
        }
        Ok(Self { entries })
    }

    pub fn uniform_prior(goals: &[Goal]) -> Result<Self> {
        if goals.is_empty() {
            return Err(Error::EmptyGoalSet);
        }
        let p = 1.0 / goals.len() as f64;
        Ok(Self { entries: goals.iter().map(|g| (g.id.clone(), p)).collect() })
    }

    pub fn entries(&self) -> &[(GoalId, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probability(&self, id: &GoalId) -> Option<f64> {
        self.entries.iter().find(|(g, _)| g == id).map(|(_, p)| *p)
    }

    /// Most probable goal; exact ties go to the lexicographically lowest id.
    pub fn map_goal(&self) -> &GoalId {
        let mut best = &self.entries[0];
        for e in &self.entries[1..] {
            if e.1 > best.1 || (e.1 == best.1 && e.0 < best.0) {
                best = e;
            }
        }
        &best.0
    }

    /// Display copy rounded to four decimals.
    pub fn rounded(&self, decimals: i32) -> Vec<(GoalId, f64)> {
        let scale = 10f64.powi(decimals);
        self.entries.iter().map(|(g, p)| (g.clone(), (p * scale).round() / scale)).collect()
    }

    /// Bayes update with the maximum-entropy likelihood.
    ///
    /// `ctx` selects the cost. In the communicated mode the likelihood is
    /// normalized per goal over `action_set`, because the effort weight makes
    /// the action normalizer depend on the goal; without communication the
    /// normalizer is goal-independent and is skipped.
    pub fn update(
        &self,
        goals: &[Goal],
        s: &WorkspaceState,
        a_h: &ControlAction,
        ctx: CostContext<'_>,
        params: &UpdateParams<'_>,
    ) -> Result<Belief> {
        if goals.len() != self.entries.len() {
            return Err(Error::InvalidBelief(format!(
                "belief has {} goals, goal set has {}",
                self.entries.len(),
                goals.len()
            )));
        }
        let mut lls = Vec::with_capacity(goals.len());
        for ((id, _), goal) in self.entries.iter().zip(goals) {
            if *id != goal.id {
                return Err(Error::UnknownGoal(goal.id.to_string()));
            }
            let mut ll = log_likelihood(s, a_h, goal, ctx, params.beta)?;
            if let CostContext::Comm(_) = ctx {
                ll -= log_partition(s, goal, ctx, params.beta, params.action_set)?;
            }
            lls.push(ll);
        }
        if lls.iter().all(|ll| *ll == lls[0]) {
            // Uninformative observation: the posterior is the prior, bit for bit.
            let mut probs: Vec<f64> = self.entries.iter().map(|e| e.1).collect();
            apply_floor(&mut probs, params.p_floor);
            return Ok(Belief { entries: self.entries.iter().map(|(g, _)| g.clone()).zip(probs).collect() });
        }
        let log_post: Vec<f64> = self.entries.iter().zip(&lls).map(|((_, p), ll)| p.ln() + ll).collect();
        let max = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = log_post.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        apply_floor(&mut probs, params.p_floor);
        Ok(Belief { entries: self.entries.iter().map(|(g, _)| g.clone()).zip(probs).collect() })
    }
}

impl TryFrom<Vec<(GoalId, f64)>> for Belief {
    type Error = Error;

    fn try_from(entries: Vec<(GoalId, f64)>) -> Result<Self> {
        Self::from_entries(entries)
    }
}

impl From<Belief> for Vec<(GoalId, f64)> {
    fn from(b: Belief) -> Self {
        b.entries
    }
}

#[derive(Clone, Copy, Debug)]
pub struct UpdateParams<'a> {
    pub beta: Rationality,
    pub p_floor: f64,
    /// Action set for the per-goal normalizer in the communicated mode.
    pub action_set: &'a [ControlAction],
}

/// Raises every entry of a normalized vector to at least `floor` and rescales
/// the rest so the total stays one.
pub fn apply_floor(probs: &mut [f64], floor: f64) {
    if floor <= 0.0 {
        return;
    }
    let k = probs.len();
    let mut pinned = vec![false; k];
    loop {
        let n_pinned = pinned.iter().filter(|x| **x).count();
        let free_mass = 1.0 - n_pinned as f64 * floor;
        let free_sum: f64 = probs.iter().zip(&pinned).filter(|(_, p)| !**p).map(|(x, _)| x).sum();
        let mut changed = false;
        for i in 0..k {
            if !pinned[i] && (free_sum <= 0.0 || probs[i] * free_mass / free_sum < floor) {
                pinned[i] = true;
                changed = true;
            }
        }
        if !changed {
            if n_pinned > 0 {
                let scale = free_mass / free_sum;
                for i in 0..k {
                    probs[i] = if pinned[i] { floor } else { probs[i] * scale };
                }
            }
            return;
        }
        if pinned.iter().all(|p| *p) {
            probs.fill(1.0 / k as f64);
            return;
        }
    }
}
