//! Worked input/output examples for every engine operation.
//!
//! Hand-derived values come from `fixtures/derived.json`, produced by
//! `oracle/derived.py` at 50-digit precision.

#![allow(dead_code)]

use commshare_core::arbitration::{assist_action, blend, AlphaSchedule};
use commshare_core::belief::UpdateParams;
use commshare_core::env::{dist, step};
use commshare_core::human::{action_likelihood, candidate_actions, q_comm, q_no_comm, sample_boltzmann};
use commshare_core::{
    library, Belief, ControlAction, CostContext, Goal, GoalId, Rationality, Termination, WorkspaceState,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Example = fn() -> Result<(), String>;

pub const TOL: f64 = 1e-9;

pub const ALL: &[(&str, Example)] = &[
    ("step", step_examples),
    ("dist", dist_examples),
    ("termination", termination_examples),
    ("q_no_comm", q_no_comm_examples),
    ("q_comm", q_comm_examples),
    ("action_likelihood", likelihood_examples),
    ("simulate_human", simulate_examples),
    ("uniform_prior", prior_examples),
    ("update", update_examples),
    ("map_goal", map_goal_examples),
    ("assist_action", assist_examples),
    ("blend", blend_examples),
    ("update_alpha", alpha_examples),
];

pub fn derived(key: &str) -> f64 {
    let table: serde_json::Value = serde_json::from_str(include_str!("../fixtures/derived.json")).unwrap();
    table[key].as_f64().unwrap_or_else(|| panic!("fixture has no {key}"))
}

fn close(what: &str, got: f64, want: f64) -> Result<(), String> {
    if (got - want).abs() <= TOL {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, want {want}"))
    }
}

fn exact<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn s(c: &[f64]) -> WorkspaceState {
    WorkspaceState::new(c).unwrap()
}

fn a(c: &[f64]) -> ControlAction {
    ControlAction::new(c).unwrap()
}

fn g(id: &str, c: &[f64]) -> Goal {
    Goal::new(id, c).unwrap()
}

fn belief(pairs: &[(&str, f64)]) -> Belief {
    Belief::from_entries(pairs.iter().map(|(id, p)| (GoalId::new(*id), *p)).collect()).unwrap()
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn step_examples() -> Result<(), String> {
    exact("identity", step(&s(&[0.0, 0.0]), &a(&[0.0, 0.0])).map_err(e)?, s(&[0.0, 0.0]))?;
    exact("translation", step(&s(&[0.0, 0.0]), &a(&[1.0, 0.0])).map_err(e)?, s(&[1.0, 0.0]))?;
    exact("3-D", step(&s(&[1.0, 2.0, 3.0]), &a(&[-1.0, 0.0, 0.5])).map_err(e)?, s(&[0.0, 2.0, 3.5]))?;
    match step(&s(&[0.0, 0.0]), &a(&[1.0, 0.0, 0.0])) {
        Err(_) => Ok(()),
        Ok(v) => Err(format!("dimension mismatch accepted: {v:?}")),
    }
}

fn dist_examples() -> Result<(), String> {
    exact("unit", dist(&s(&[0.0, 0.0]), &g("g", &[1.0, 0.0])).map_err(e)?, 1.0)?;
    exact("3-4-5", dist(&s(&[0.0, 0.0]), &g("g", &[3.0, 4.0])).map_err(e)?, 5.0)?;
    exact("coincident", dist(&s(&[2.0, -7.0]), &g("g", &[2.0, -7.0])).map_err(e)?, 0.0)?;
    if dist(&s(&[0.0, 0.0]), &g("g", &[1.0, 0.0, 0.0])).is_ok() {
        return Err("dimension mismatch accepted".into());
    }
    Ok(())
}

fn termination_examples() -> Result<(), String> {
    let sc = library::get("single_goal_2d").ok_or("single_goal_2d missing")?;
    let goal = sc.true_goal().clone();
    let far = sc.start;
    exact("at goal", sc.is_terminal(&WorkspaceState(goal.position), 0).map_err(e)?, Termination::Reached(goal.id))?;
    exact("timeout", sc.is_terminal(&far, sc.t_max).map_err(e)?, Termination::Timeout)?;
    exact("running", sc.is_terminal(&far, sc.t_max - 1).map_err(e)?, Termination::Running)
}

fn q_no_comm_examples() -> Result<(), String> {
    let origin = s(&[0.0, 0.0]);
    let east = g("g", &[1.0, 0.0]);
    exact("zero action", q_no_comm(&origin, &a(&[0.0, 0.0]), &east).map_err(e)?, 0.0)?;
    exact("collinear", q_no_comm(&origin, &a(&[1.0, 0.0]), &east).map_err(e)?, 0.0)?;
    close("orthogonal", q_no_comm(&origin, &a(&[0.0, 1.0]), &east).map_err(e)?, derived("q_no_comm_orthogonal"))
}

fn q_comm_examples() -> Result<(), String> {
    let origin = s(&[0.0, 0.0]);
    let east = g("g", &[1.0, 0.0]);
    let west = g("h", &[-3.0, 2.0]);
    let b = belief(&[("g", 0.5), ("h", 0.5)]);
    for (goal, at) in [(&east, s(&[4.0, -1.0])), (&west, s(&[0.5, 9.0]))] {
        exact("zero action", q_comm(&at, &a(&[0.0, 0.0]), goal, &b).map_err(e)?, 0.0)?;
    }
    let full = belief(&[("g", 1.0)]);
    exact("full belief", q_comm(&origin, &a(&[1.0, 0.0]), &east, &full).map_err(e)?, 0.0)?;
    close("half belief", q_comm(&origin, &a(&[1.0, 0.0]), &east, &b).map_err(e)?, derived("q_comm_half_belief"))?;
    if q_comm(&origin, &a(&[1.0, 0.0]), &g("x", &[1.0, 0.0]), &b).is_ok() {
        return Err("goal outside the belief accepted".into());
    }
    Ok(())
}

fn likelihood_examples() -> Result<(), String> {
    let origin = s(&[0.0, 0.0]);
    let north = g("g2", &[0.0, 1.0]);
    let zero_beta = Rationality::new(0.0).map_err(e)?;
    let one = Rationality::new(1.0).map_err(e)?;
    exact(
        "beta 0",
        action_likelihood(&s(&[3.0, 1.0]), &a(&[0.0, 1.0]), &north, CostContext::NoComm, zero_beta).map_err(e)?,
        1.0,
    )?;
    exact("zero cost", action_likelihood(&origin, &a(&[0.0, 0.0]), &north, CostContext::NoComm, one).map_err(e)?, 1.0)?;
    let nudge = a(&[0.1, 0.0]);
    close("wrong goal cost", q_no_comm(&origin, &nudge, &north).map_err(e)?, derived("q_no_comm_wrong_goal"))?;
    close(
        "wrong goal likelihood",
        action_likelihood(&origin, &nudge, &north, CostContext::NoComm, one).map_err(e)?,
        derived("likelihood_wrong_goal_beta1"),
    )
}

fn draw_counts(costs: &[f64], beta: f64, draws: usize) -> Vec<usize> {
    let beta = Rationality::new(beta).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut counts = vec![0; costs.len()];
    for _ in 0..draws {
        counts[sample_boltzmann(costs, beta, &mut rng).unwrap()] += 1;
    }
    counts
}

fn simulate_examples() -> Result<(), String> {
    let origin = s(&[0.0, 0.0]);
    let goal = g("g", &[100.0, 0.0]);
    let cands = candidate_actions(2, 1.0);
    let costs = |ctx: CostContext<'_>| -> Vec<f64> {
        cands.iter().map(|c| commshare_core::human::cost(&origin, c, &goal, ctx).unwrap()).collect()
    };

    // Rational limit: every draw is a cheapest candidate. Straight ahead the
    // zero action and both collinear pushes all cost zero.
    let q = costs(CostContext::NoComm);
    let min = q.iter().copied().fold(f64::INFINITY, f64::min);
    let counts = draw_counts(&q, 1e6, 500);
    let on_min: usize = counts.iter().zip(&q).filter(|(_, c)| **c - min <= TOL).map(|(n, _)| n).sum();
    exact("argmax draws", on_min, 500)?;
    exact("cheapest set size", q.iter().filter(|c| **c - min <= TOL).count(), 3)?;

    // Full belief: the zero action and the full-speed push tie at zero cost.
    let full = belief(&[("g", 1.0)]);
    let q = costs(CostContext::Comm(&full));
    let push = cands.iter().position(|c| *c == a(&[1.0, 0.0])).unwrap();
    close("push cost at full belief", q[push], 0.0)?;
    exact("zero action cost", q[0], 0.0)?;
    let counts = draw_counts(&[q[0], q[push]], 1e6, 2000);
    if counts[0].abs_diff(1000) > 100 {
        return Err(format!("tie not split evenly: {counts:?}"));
    }

    // Low belief: pushing costs -0.8 and dominates.
    let low = belief(&[("g", 0.2), ("h", 0.8)]);
    let q = costs(CostContext::Comm(&low));
    close("push cost at low belief", q[push], derived("q_comm_low_belief_push"))?;
    let best = (0..q.len()).min_by(|i, j| q[*i].total_cmp(&q[*j])).unwrap();
    exact("low belief argmax", best, push)?;
    exact("low belief draws", draw_counts(&q, 1e6, 500)[push], 500)
}

fn prior_examples() -> Result<(), String> {
    for k in [1usize, 3, 4] {
        let goals: Vec<Goal> = (0..k).map(|i| g(&format!("g{i}"), &[i as f64, 0.0])).collect();
        let b = Belief::uniform_prior(&goals).map_err(e)?;
        for (_, p) in b.entries() {
            close("uniform", *p, 1.0 / k as f64)?;
        }
    }
    if Belief::uniform_prior(&[]).is_ok() {
        return Err("empty goal set accepted".into());
    }
    Ok(())
}

fn update_examples() -> Result<(), String> {
    let one = Rationality::new(1.0).map_err(e)?;
    let params = UpdateParams { beta: one, p_floor: 1e-4, action_set: &[] };
    let origin = s(&[0.0, 0.0]);

    let goals = [g("g1", &[1.0, 0.0]), g("g2", &[0.0, 1.0]), g("g3", &[-2.0, 5.0])];
    let prior = belief(&[("g1", 0.2), ("g2", 0.5), ("g3", 0.3)]);
    let same = prior.update(&goals, &s(&[4.0, 4.0]), &a(&[0.0, 0.0]), CostContext::NoComm, &params).map_err(e)?;
    exact("zero input", same, prior)?;

    let mirror = [g("up", &[1.0, 1.0]), g("down", &[1.0, -1.0])];
    let b = Belief::uniform_prior(&mirror).map_err(e)?;
    let post = b.update(&mirror, &origin, &a(&[1.0, 0.0]), CostContext::NoComm, &params).map_err(e)?;
    for (_, p) in post.entries() {
        close("mirror", *p, 0.5)?;
    }

    let pair = [g("g1", &[1.0, 0.0]), g("g2", &[0.0, 1.0])];
    let b = Belief::uniform_prior(&pair).map_err(e)?;
    let post = b.update(&pair, &origin, &a(&[0.1, 0.0]), CostContext::NoComm, &params).map_err(e)?;
    close("g1", post.entries()[0].1, derived("posterior_two_goal_g1"))?;
    close("g2", post.entries()[1].1, derived("posterior_two_goal_g2"))
}

fn map_goal_examples() -> Result<(), String> {
    exact("clear", belief(&[("g1", 0.7), ("g2", 0.3)]).map_goal().as_str(), "g1")?;
    exact("tie", belief(&[("g1", 0.5), ("g2", 0.5)]).map_goal().as_str(), "g1")?;
    exact("tie, reversed order", belief(&[("g2", 0.5), ("g1", 0.5)]).map_goal().as_str(), "g1")?;
    exact("third", belief(&[("g1", 0.2), ("g2", 0.2), ("g3", 0.6)]).map_goal().as_str(), "g3")
}

fn assist_examples() -> Result<(), String> {
    let origin = s(&[0.0, 0.0]);
    let single = [g("g", &[1.0, 0.0])];
    exact("single", assist_action(&belief(&[("g", 1.0)]), &origin, &single, 1.0).map_err(e)?, a(&[1.0, 0.0]))?;
    let opposed = [g("e", &[1.0, 0.0]), g("w", &[-1.0, 0.0])];
    let b = Belief::uniform_prior(&opposed).map_err(e)?;
    exact("cancel", assist_action(&b, &origin, &opposed, 1.0).map_err(e)?, a(&[0.0, 0.0]))?;
    let pair = [g("g1", &[1.0, 0.0]), g("g2", &[0.0, 1.0])];
    let r = assist_action(&belief(&[("g1", 0.75), ("g2", 0.25)]), &origin, &pair, 10.0).map_err(e)?;
    close("weighted x", r.delta().as_slice()[0], derived("assist_weighted_x"))?;
    close("weighted y", r.delta().as_slice()[1], derived("assist_weighted_y"))
}

fn blend_examples() -> Result<(), String> {
    let h = a(&[0.3, -0.7]);
    let r = a(&[0.9, 0.1]);
    exact("alpha 0", blend(&h, &r, 0.0, 1.0).map_err(e)?, h)?;
    exact("alpha 1", blend(&h, &r, 1.0, 1.0).map_err(e)?, r)?;
    exact("midpoint", blend(&a(&[1.0, 0.0]), &a(&[0.0, 1.0]), 0.5, 1.0).map_err(e)?, a(&[0.5, 0.5]))
}

fn alpha_examples() -> Result<(), String> {
    let sched = |alpha: f64| AlphaSchedule { alpha, alpha_min: 0.2, alpha_max: 0.9, step: 0.05, input_epsilon: 0.01 };
    close("silent", sched(0.30).update(&a(&[0.0, 0.0])).alpha, 0.35)?;
    exact("clamped", sched(0.9).update(&a(&[0.0, 0.0])).alpha, 0.9)?;
    close("active", sched(0.30).update(&a(&[0.5, 0.0])).alpha, 0.25)
}
