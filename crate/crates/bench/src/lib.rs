//! Fixtures shared by the engine benchmarks.

use commshare_core::human::candidate_actions;
use commshare_core::{library, Belief, ControlAction, Goal, Scenario, WorkspaceState};

/// A mid-episode inference step: goals, state, input, prior and candidate set.
pub struct UpdateFixture {
    pub goals: Vec<Goal>,
    pub state: WorkspaceState,
    pub input: ControlAction,
    pub prior: Belief,
    pub candidates: Vec<ControlAction>,
}

pub fn update_fixture(name: &str) -> UpdateFixture {
    let sc: Scenario = library::get(name).expect("shipped scenario");
    let dim = sc.dim();
    let mut toward = sc.true_goal().position - sc.start.position();
    toward = toward * (0.5 * sc.v_max / toward.norm());
    let entries: Vec<_> = sc
        .goals
        .iter()
        .enumerate()
        .map(|(i, g)| (g.id.clone(), (i + 1) as f64))
        .collect();
    let total: f64 = entries.iter().map(|(_, w)| w).sum();
    let prior = Belief::from_entries(entries.into_iter().map(|(id, w)| (id, w / total)).collect()).unwrap();
    UpdateFixture {
        candidates: candidate_actions(dim, sc.v_max),
        goals: sc.goals.clone(),
        state: sc.start,
        input: ControlAction(toward),
        prior,
    }
}
