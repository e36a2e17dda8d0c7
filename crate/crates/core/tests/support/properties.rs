//! Engine invariants as seeded property checks.
//!
//! Each entry runs `cases` generated inputs and returns the first
//! counterexample as text. Shared by the core test target and the
//! workspace acceptance suite.

#![allow(dead_code)]

use commshare_core::arbitration::{assist_action, blend, AlphaSchedule};
use commshare_core::belief::{UpdateParams, DEFAULT_P_FLOOR, NORMALIZATION_TOL};
use commshare_core::env::{dist, step};
use commshare_core::human::{action_likelihood, candidate_actions, q_comm, q_no_comm};
use commshare_core::sim::{replay, run_condition, run_scripted, ReplayOutcome};
use commshare_core::{
    Belief, Condition, ControlAction, Controller, CostContext, CostMode, EngineConfig, Goal, GoalId, Rationality,
    Scenario, Termination, Vector, WorkspaceState,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub type Property = fn(u32) -> Result<(), String>;

pub const ALL: &[(&str, Property)] = &[
    ("posterior normalized, floored, same support", posterior_normalized),
    ("silence leaves the baseline posterior unchanged", zero_input_invariance),
    ("goal relabeling permutes the posterior", label_permutation),
    ("alpha stays within bounds", alpha_bounds),
    ("alpha monotone over silent and active runs", alpha_monotone),
    ("blend magnitude capped and limits exact", blend_limits),
    ("clipped actions respect v_max", clip_bound),
    ("full-belief communicated cost equals baseline cost", q_comm_degenerates),
    ("baseline cost is nonnegative", q_no_comm_nonnegative),
    ("communicated cost lower bound", q_comm_lower_bound),
    ("likelihood decreasing in cost and in beta", likelihood_monotone),
    ("distance triangle inequality", triangle_inequality),
    ("step is reversible", step_reversible),
    ("assistance invariant under relabeling", assist_relabel),
    ("reaching is permanent under zero action", reached_is_permanent),
    ("single goal, silent operator closes distance", single_goal_closes),
    ("episodes: inputs <= ticks, replay closure", episode_closure),
];

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn coord() -> impl Strategy<Value = f64> {
    -500.0..500.0f64
}

fn point(dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(coord(), dim).prop_map(|c| Vector::new(&c).unwrap())
}

fn action(dim: usize, v_max: f64) -> impl Strategy<Value = ControlAction> {
    (prop::collection::vec(-1.0..1.0f64, dim), 0.0..=1.0f64)
        .prop_map(move |(d, r)| {
            let v = Vector::new(&d).unwrap();
            let n = v.norm();
            if n == 0.0 {
                ControlAction::zero(d.len())
            } else {
                ControlAction(v * (r * v_max / n))
            }
        })
}

fn goals(dim: usize, k: usize) -> impl Strategy<Value = Vec<Goal>> {
    prop::collection::vec(point(dim), k).prop_map(|ps| {
        ps.into_iter().enumerate().map(|(i, p)| Goal { id: GoalId::new(format!("g{i}")), position: p }).collect()
    })
}

/// Normalized belief over `goals` proportional to `weights`.
fn belief_for(goals: &[Goal], weights: &[f64]) -> Belief {
    let total: f64 = weights.iter().sum();
    let mut entries: Vec<(GoalId, f64)> =
        goals.iter().zip(weights).map(|(g, w)| (g.id.clone(), w / total)).collect();
    let head: f64 = entries[1..].iter().map(|e| e.1).sum();
    entries[0].1 = 1.0 - head;
    Belief::from_entries(entries).unwrap()
}

/// A random inference problem: dimension, goals, state, input, prior, beta, v_max.
#[derive(Clone, Debug)]
pub struct Problem {
    pub goals: Vec<Goal>,
    pub s: WorkspaceState,
    pub a: ControlAction,
    pub prior: Belief,
    pub beta: f64,
    pub v_max: f64,
    pub mode: CostMode,
}

pub fn problem(max_goals: usize) -> impl Strategy<Value = Problem> {
    (2usize..=3, 1usize..=max_goals, 0.5..20.0f64)
        .prop_flat_map(|(dim, k, v_max)| {
            (
                goals(dim, k),
                point(dim),
                action(dim, v_max),
                prop::collection::vec(0.01..1.0f64, k),
                0.0..=10.0f64,
                Just(v_max),
                prop_oneof![Just(CostMode::NoComm), Just(CostMode::Comm)],
            )
        })
        .prop_map(|(goals, s, a, w, beta, v_max, mode)| Problem {
            prior: belief_for(&goals, &w),
            goals,
            s: WorkspaceState(s),
            a,
            beta,
            v_max,
            mode,
        })
}

impl Problem {
    pub fn update(&self) -> Belief {
        let cands = candidate_actions(self.s.dim(), self.v_max);
        let params = UpdateParams { beta: Rationality::new(self.beta).unwrap(), p_floor: DEFAULT_P_FLOOR, action_set: &cands };
        let ctx = match self.mode {
            CostMode::NoComm => CostContext::NoComm,
            CostMode::Comm => CostContext::Comm(&self.prior),
        };
        self.prior.update(&self.goals, &self.s, &self.a, ctx, &params).unwrap()
    }
}

pub fn posterior_normalized(cases: u32) -> Result<(), String> {
    check(cases, problem(4), |p| {
        let post = p.update();
        let sum: f64 = post.entries().iter().map(|e| e.1).sum();
        prop_assert!((sum - 1.0).abs() <= NORMALIZATION_TOL, "sum {sum}");
        for ((id, x), g) in post.entries().iter().zip(&p.goals) {
            prop_assert_eq!(id, &g.id);
            prop_assert!(*x >= DEFAULT_P_FLOOR * (1.0 - 1e-12), "{id} = {x}");
        }
        Ok(())
    })
}

pub fn zero_input_invariance(cases: u32) -> Result<(), String> {
    check(cases, problem(4), |mut p| {
        p.mode = CostMode::NoComm;
        p.a = ControlAction::zero(p.s.dim());
        prop_assert_eq!(p.update(), p.prior);
        Ok(())
    })
}

pub fn label_permutation(cases: u32) -> Result<(), String> {
    let strat = problem(4).prop_flat_map(|p| {
        let k = p.goals.len();
        (Just(p), Just((0..k).collect::<Vec<_>>()).prop_shuffle())
    });
    check(cases, strat, |(p, perm)| {
        let post = p.update();
        let goals: Vec<Goal> = perm.iter().map(|&i| p.goals[i].clone()).collect();
        let prior = Belief::from_entries(perm.iter().map(|&i| p.prior.entries()[i].clone()).collect()).unwrap();
        let q = Problem { goals, prior, ..p.clone() };
        let permuted = q.update();
        for (j, &i) in perm.iter().enumerate() {
            let (a, b) = (&post.entries()[i], &permuted.entries()[j]);
            prop_assert_eq!(&a.0, &b.0);
            prop_assert!((a.1 - b.1).abs() <= 1e-12, "{} vs {}", a.1, b.1);
        }
        Ok(())
    })
}

fn schedule() -> impl Strategy<Value = AlphaSchedule> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.001..0.5f64, 0.0..0.5f64).prop_map(|(x, y, step, eps)| {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        AlphaSchedule::new(lo, hi, step, eps).unwrap()
    })
}

pub fn alpha_bounds(cases: u32) -> Result<(), String> {
    let strat = (schedule(), prop::collection::vec(action(2, 1.0), 0..200));
    check(cases, strat, |(mut sched, inputs)| {
        for a in &inputs {
            sched = sched.update(a);
            prop_assert!(sched.alpha >= sched.alpha_min && sched.alpha <= sched.alpha_max, "{}", sched.alpha);
        }
        Ok(())
    })
}

pub fn alpha_monotone(cases: u32) -> Result<(), String> {
    let strat = (schedule(), prop::collection::vec(action(3, 1.0), 1..200));
    check(cases, strat, |(mut sched, inputs)| {
        for a in &inputs {
            let before = sched.alpha;
            sched = sched.update(a);
            if sched.is_silent(a) {
                prop_assert!(sched.alpha >= before);
            } else {
                prop_assert!(sched.alpha <= before);
            }
        }
        Ok(())
    })
}

pub fn blend_limits(cases: u32) -> Result<(), String> {
    let strat = (0.5..20.0f64).prop_flat_map(|v| (action(3, v), action(3, v), 0.0..=1.0f64, Just(v)));
    check(cases, strat, |(a_h, a_r, alpha, v_max)| {
        let b = blend(&a_h, &a_r, alpha, v_max).unwrap();
        prop_assert!(b.magnitude() <= v_max * (1.0 + 1e-12));
        prop_assert_eq!(blend(&a_h, &a_r, 0.0, v_max).unwrap(), a_h.clipped(v_max));
        prop_assert_eq!(blend(&a_h, &a_r, 1.0, v_max).unwrap(), a_r.clipped(v_max));
        Ok(())
    })
}

pub fn clip_bound(cases: u32) -> Result<(), String> {
    let strat = (point(3), 0.01..50.0f64);
    check(cases, strat, |(v, v_max)| {
        let a = ControlAction(v).clipped(v_max);
        prop_assert!(a.magnitude() <= v_max * (1.0 + 1e-12));
        prop_assert_eq!(a.clipped(v_max), a);
        Ok(())
    })
}

pub fn q_comm_degenerates(cases: u32) -> Result<(), String> {
    check(cases, problem(1), |p| {
        let full = Belief::from_entries(vec![(p.goals[0].id.clone(), 1.0)]).unwrap();
        let lhs = q_comm(&p.s, &p.a, &p.goals[0], &full).unwrap();
        let rhs = q_no_comm(&p.s, &p.a, &p.goals[0]).unwrap();
        prop_assert_eq!(lhs.to_bits(), rhs.to_bits());
        Ok(())
    })
}

pub fn q_no_comm_nonnegative(cases: u32) -> Result<(), String> {
    check(cases, problem(1), |p| {
        let q = q_no_comm(&p.s, &p.a, &p.goals[0]).unwrap();
        prop_assert!(q >= -1e-9, "{q}");
        Ok(())
    })
}

pub fn q_comm_lower_bound(cases: u32) -> Result<(), String> {
    check(cases, problem(4), |p| {
        for g in &p.goals {
            let b = p.prior.probability(&g.id).unwrap();
            let q = q_comm(&p.s, &p.a, g, &p.prior).unwrap();
            prop_assert!(q >= (b - 1.0) * p.a.magnitude() - 1e-9, "{q} vs b={b}");
        }
        Ok(())
    })
}

pub fn likelihood_monotone(cases: u32) -> Result<(), String> {
    let strat = problem(1).prop_flat_map(|p| {
        let dim = p.s.dim();
        let v = p.v_max;
        (Just(p), action(dim, v), 0.01..10.0f64, 0.01..10.0f64)
    });
    check(cases, strat, |(p, other, b1, b2)| {
        let g = &p.goals[0];
        let beta = Rationality::new(p.beta.max(0.01)).unwrap();
        let (q1, q2) = (q_no_comm(&p.s, &p.a, g).unwrap(), q_no_comm(&p.s, &other, g).unwrap());
        let l1 = action_likelihood(&p.s, &p.a, g, CostContext::NoComm, beta).unwrap();
        let l2 = action_likelihood(&p.s, &other, g, CostContext::NoComm, beta).unwrap();
        // Strictness needs the difference to survive the exponential.
        if q1 < q2 && (q2 - q1) * beta.beta() > 1e-12 && l1 > f64::MIN_POSITIVE {
            prop_assert!(l1 > l2, "q {q1} < {q2} but l {l1} <= {l2}");
        }
        let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
        if q1 > 0.0 && (hi - lo) * q1 > 1e-12 && lo * q1 < 700.0 {
            let at = |b: f64| action_likelihood(&p.s, &p.a, g, CostContext::NoComm, Rationality::new(b).unwrap()).unwrap();
            prop_assert!(at(lo) > at(hi));
        }
        Ok(())
    })
}

pub fn triangle_inequality(cases: u32) -> Result<(), String> {
    let strat = (2usize..=3).prop_flat_map(|d| (point(d), point(d), point(d)));
    check(cases, strat, |(a, b, c)| {
        let d = |x: Vector, y: Vector| dist(&WorkspaceState(x), &Goal { id: "y".into(), position: y }).unwrap();
        prop_assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-9);
        Ok(())
    })
}

pub fn step_reversible(cases: u32) -> Result<(), String> {
    let strat = (2usize..=3).prop_flat_map(|d| (point(d), action(d, 20.0)));
    check(cases, strat, |(s, a)| {
        let s = WorkspaceState(s);
        let back = step(&step(&s, &a).unwrap(), &ControlAction(-a.delta())).unwrap();
        for i in 0..s.dim() {
            prop_assert!((back.position()[i] - s.position()[i]).abs() <= 1e-12);
        }
        Ok(())
    })
}

pub fn assist_relabel(cases: u32) -> Result<(), String> {
    let strat = problem(4).prop_flat_map(|p| {
        let k = p.goals.len();
        (Just(p), Just((0..k).collect::<Vec<_>>()).prop_shuffle())
    });
    check(cases, strat, |(p, perm)| {
        // Move every label to a new goal while keeping each goal's probability.
        let relabeled: Vec<Goal> = p
            .goals
            .iter()
            .enumerate()
            .map(|(i, g)| Goal { id: GoalId::new(format!("x{}", perm[i])), position: g.position })
            .collect();
        let b = Belief::from_entries(
            relabeled.iter().zip(p.prior.entries()).map(|(g, (_, x))| (g.id.clone(), *x)).collect(),
        )
        .unwrap();
        let lhs = assist_action(&p.prior, &p.s, &p.goals, p.v_max).unwrap();
        let rhs = assist_action(&b, &p.s, &relabeled, p.v_max).unwrap();
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

fn single_goal_scenario(start: Vector, goal: Vector, v_max: f64, radius: f64) -> Scenario {
    Scenario {
        schema_version: 1,
        id: "prop".into(),
        description: String::new(),
        start: WorkspaceState(start),
        goals: vec![Goal { id: "g".into(), position: goal }],
        true_goal_id: "g".into(),
        v_max,
        goal_radius: radius,
        t_max: 5000,
        tick_dt: 0.02,
        waypoints: vec![],
    }
}

pub fn reached_is_permanent(cases: u32) -> Result<(), String> {
    let strat = (2usize..=3).prop_flat_map(|d| (point(d), point(d), 1.0..50.0f64, 0u64..100));
    check(cases, strat, |(g, offset, radius, t)| {
        let s = WorkspaceState(g + offset * (0.99 * radius / (offset.norm() + 1e-9)).min(1.0));
        let sc = single_goal_scenario(s.position(), g, 1.0, radius);
        let first = sc.is_terminal(&s, t).unwrap();
        prop_assert_eq!(&first, &Termination::Reached("g".into()));
        let next = step(&s, &ControlAction::zero(s.dim())).unwrap();
        prop_assert_eq!(sc.is_terminal(&next, t + 1).unwrap(), first);
        Ok(())
    })
}

pub fn single_goal_closes(cases: u32) -> Result<(), String> {
    let strat = (2usize..=3).prop_flat_map(|d| (point(d), point(d), 0.5..20.0f64, 0.5..10.0f64, 0.01..=1.0f64));
    check(cases, strat, |(start, goal, v_max, radius, alpha_min)| {
        let sc = single_goal_scenario(start, goal, v_max, radius);
        let cfg = EngineConfig { alpha_min, alpha_max: alpha_min.max(0.9), ..EngineConfig::default() };
        let mut c = Controller::new(sc.clone(), cfg).unwrap();
        let mut d = dist(c.state(), &sc.goals[0]).unwrap();
        while c.is_running() {
            c.tick(ControlAction::zero(sc.dim())).unwrap();
            let now = dist(c.state(), &sc.goals[0]).unwrap();
            prop_assert!(now < d, "t={} {now} >= {d}", c.t());
            d = now;
        }
        prop_assert!(matches!(c.status(), Termination::Reached(_)));
        Ok(())
    })
}

/// Random three-goal 2-D layouts in front of the origin.
pub fn three_goal_layout() -> impl Strategy<Value = Scenario> {
    (prop::collection::vec((150.0..350.0f64, -1.2..1.2f64), 3), 0usize..3).prop_map(|(polar, true_idx)| {
        let goals: Vec<Goal> = polar
            .iter()
            .enumerate()
            .map(|(i, (r, th))| Goal::new(format!("g{i}"), &[r * th.cos(), r * th.sin()]).unwrap())
            .collect();
        Scenario {
            schema_version: 1,
            id: "layout".into(),
            description: String::new(),
            start: WorkspaceState::new(&[0.0, 0.0]).unwrap(),
            true_goal_id: goals[true_idx].id.clone(),
            waypoints: Vec::new(),
            goals,
            v_max: 4.0,
            goal_radius: 10.0,
            t_max: 400,
            tick_dt: 0.02,
        }
    })
}

pub fn episode_closure(cases: u32) -> Result<(), String> {
    let cond = prop_oneof![Just(Condition::Without), Just(Condition::With), Just(Condition::Ours)];
    let strat = (three_goal_layout(), cond, any::<u64>());
    check(cases, strat, |(sc, cond, seed)| {
        let (m, log) = run_condition(&sc, &EngineConfig::default(), cond, seed).unwrap();
        prop_assert!(m.total_human_inputs <= m.ticks_to_goal);
        prop_assert_eq!(replay(&log).unwrap(), ReplayOutcome::Match);
        let (again, relog) = run_scripted(&sc, &log.header.config, log.inputs()).unwrap();
        prop_assert_eq!(&again, &m);
        prop_assert_eq!(&relog.records, &log.records);
        Ok(())
    })
}
