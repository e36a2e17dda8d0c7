//! Seeded closed-loop episodes, episode logs, replay and batch summaries.

use serde::{Deserialize, Serialize};

use crate::config::{Condition, EngineConfig, HumanKind};
use crate::engine::{Controller, TickRecord};
use crate::env::{ControlAction, Scenario, Termination};
use crate::error::{Error, Result};
use crate::operator::{operator_for, Operator, ScriptedOperator};

pub const LOG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    /// Ticks whose input magnitude exceeded the silence threshold.
    pub total_human_inputs: u64,
    pub ticks_to_goal: u64,
    pub success: bool,
    pub input_magnitude_series: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub config: EngineConfig,
    pub seed: u64,
    pub human: HumanKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<Condition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum LogLine {
    Header(LogHeader),
    Tick(TickRecord),
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LogError {
    #[error("log is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: expected tick {expected}, found {found}")]
    Gap { line: usize, expected: u64, found: u64 },
}

/// Header plus one record per tick, stored as line-delimited JSON.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeLog {
    pub header: LogHeader,
    pub records: Vec<TickRecord>,
}

impl EpisodeLog {
    pub fn new(header: LogHeader) -> Self {
        Self { header, records: Vec::new() }
    }

    pub fn header_line(&self) -> String {
        serde_json::to_string(&LogLine::Header(self.header.clone())).expect("header serializes")
    }

    pub fn record_line(record: &TickRecord) -> String {
        serde_json::to_string(&LogLine::Tick(record.clone())).expect("record serializes")
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = self.header_line();
        out.push('\n');
        for r in &self.records {
            out.push_str(&Self::record_line(r));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> std::result::Result<Self, LogError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(LogError::Empty)?;
        let parse = |i: usize, l: &str| {
            serde_json::from_str::<LogLine>(l).map_err(|e| LogError::Parse { line: i + 1, message: e.to_string() })
        };
        let header = match parse(0, first)? {
            LogLine::Header(h) => h,
            LogLine::Tick(_) => return Err(LogError::Parse { line: 1, message: "first line must be the header".into() }),
        };
        let mut log = EpisodeLog::new(header);
        for (i, l) in lines {
            match parse(i, l)? {
                LogLine::Tick(r) => {
                    let expected = log.records.len() as u64;
                    if r.t != expected {
                        return Err(LogError::Gap { line: i + 1, expected, found: r.t });
                    }
                    log.records.push(r);
                }
                LogLine::Header(_) => {
                    return Err(LogError::Parse { line: i + 1, message: "unexpected second header".into() })
                }
            }
        }
        Ok(log)
    }

    pub fn inputs(&self) -> Vec<ControlAction> {
        self.records.iter().map(|r| r.a_h).collect()
    }

    pub fn metrics(&self) -> EpisodeMetrics {
        let eps = self.header.config.input_epsilon_for(self.header.scenario.v_max);
        let series: Vec<f64> = self.records.iter().map(|r| r.a_h.magnitude()).collect();
        EpisodeMetrics {
            total_human_inputs: series.iter().filter(|m| **m > eps).count() as u64,
            ticks_to_goal: self.records.len() as u64,
            success: self
                .records
                .last()
                .is_some_and(|r| matches!(r.status, Termination::Reached(_))),
            input_magnitude_series: series,
        }
    }
}

/// Runs one episode with a caller-supplied operator.
pub fn run_with_operator(
    scenario: &Scenario,
    config: &EngineConfig,
    human: HumanKind,
    operator: &mut dyn Operator,
) -> Result<(EpisodeMetrics, EpisodeLog)> {
    if human.needs_display() && !config.communication_shown {
        return Err(Error::InvalidConfig("communication-aware operator requires communication_shown".into()));
    }
    let mut controller = Controller::new(scenario.clone(), config.clone())?;
    let mut log = EpisodeLog::new(LogHeader {
        schema_version: LOG_SCHEMA_VERSION,
        scenario: scenario.clone(),
        config: config.clone(),
        seed: config.seed,
        human,
        condition: None,
        session_id: None,
    });
    while controller.is_running() {
        let a_h = operator.act(&controller.observation()?)?;
        log.records.push(controller.tick(a_h)?);
    }
    Ok((log.metrics(), log))
}

/// Runs one seeded episode with a simulated operator of the given kind.
pub fn run_episode(scenario: &Scenario, config: &EngineConfig, human: HumanKind) -> Result<(EpisodeMetrics, EpisodeLog)> {
    let mut operator = operator_for(human, config.beta, config.seed)?;
    run_with_operator(scenario, config, human, operator.as_mut())
}

pub fn run_scripted(
    scenario: &Scenario,
    config: &EngineConfig,
    inputs: Vec<ControlAction>,
) -> Result<(EpisodeMetrics, EpisodeLog)> {
    let mut operator = ScriptedOperator::new(inputs);
    run_with_operator(scenario, config, HumanKind::Scripted, &mut operator)
}

/// Runs one of the three experimental conditions.
pub fn run_condition(
    scenario: &Scenario,
    base: &EngineConfig,
    condition: Condition,
    seed: u64,
) -> Result<(EpisodeMetrics, EpisodeLog)> {
    let (config, human) = condition.arm(base);
    let config = EngineConfig { seed, ..config };
    let (metrics, mut log) = run_episode(scenario, &config, human)?;
    log.header.condition = Some(condition);
    Ok((metrics, log))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayOutcome {
    Match,
    Diverged { tick: u64, field: &'static str },
}

/// Re-simulates a log from its header and recorded inputs.
pub fn replay(log: &EpisodeLog) -> Result<ReplayOutcome> {
    let mut controller = Controller::new(log.header.scenario.clone(), log.header.config.clone())?;
    for rec in &log.records {
        if !controller.is_running() {
            return Ok(ReplayOutcome::Diverged { tick: rec.t, field: "status" });
        }
        let again = controller.tick(rec.a_h)?;
        let field = if again.a_h != rec.a_h {
            Some("a_h")
        } else if again.stage != rec.stage {
            Some("stage")
        } else if again.belief != rec.belief {
            Some("belief")
        } else if again.alpha.to_bits() != rec.alpha.to_bits() {
            Some("alpha")
        } else if again.a_r != rec.a_r {
            Some("a_r")
        } else if again.a_b != rec.a_b {
            Some("a_b")
        } else if again.s != rec.s {
            Some("s")
        } else if again.status != rec.status {
            Some("status")
        } else {
            None
        };
        if let Some(field) = field {
            return Ok(ReplayOutcome::Diverged { tick: rec.t, field });
        }
    }
    if controller.is_running() && !log.records.is_empty() {
        // A finished simulation log ends on a terminal tick; a live session may
        // be cut short, which still replays as a prefix.
        if log.header.session_id.is_none() {
            return Ok(ReplayOutcome::Diverged { tick: controller.t(), field: "status" });
        }
    }
    Ok(ReplayOutcome::Match)
}

/// One batch arm: a labelled config and operator population.
#[derive(Clone, Debug, PartialEq)]
pub struct Arm {
    pub label: String,
    pub config: EngineConfig,
    pub human: HumanKind,
    pub condition: Option<Condition>,
}

impl Arm {
    pub fn from_condition(condition: Condition, base: &EngineConfig) -> Self {
        let (config, human) = condition.arm(base);
        Self { label: condition.name().to_owned(), config, human, condition: Some(condition) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub scenario: String,
    pub condition: String,
    pub seed: u64,
    pub success: bool,
    pub ticks_to_goal: u64,
    pub total_human_inputs: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub condition: String,
    pub n: usize,
    pub success_rate: f64,
    pub mean_ticks_to_goal: f64,
    pub std_ticks_to_goal: f64,
    pub mean_total_human_inputs: f64,
    pub std_total_human_inputs: f64,
}

#[derive(Clone, Debug, Default)]
pub struct BatchResult {
    pub episodes: Vec<EpisodeRow>,
    pub summary: Vec<SummaryRow>,
    /// Present when logs were requested; same order as `episodes`.
    pub logs: Vec<EpisodeLog>,
    pub metrics: Vec<EpisodeMetrics>,
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every (scenario, arm, seed) episode; seeds are `base_seed + i`.
///
/// Episodes run on `jobs` worker threads (all cores when zero); output order
/// does not depend on the thread count.
pub fn run_batch(
    scenarios: &[Scenario],
    arms: &[Arm],
    n_seeds: u64,
    base_seed: u64,
    jobs: usize,
    keep_logs: bool,
) -> Result<BatchResult> {
    use rayon::prelude::*;

    if n_seeds == 0 {
        return Err(Error::InvalidConfig("n_seeds must be >= 1".into()));
    }
    let mut work = Vec::new();
    for sc in scenarios {
        for arm in arms {
            arm.config.validate_for(sc)?;
            for i in 0..n_seeds {
                work.push((sc, arm, base_seed.wrapping_add(i)));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let outcomes: Vec<(EpisodeMetrics, EpisodeLog)> = pool.install(|| {
        work.par_iter()
            .map(|(sc, arm, seed)| {
                let config = EngineConfig { seed: *seed, ..arm.config.clone() };
                let (m, mut log) = run_episode(sc, &config, arm.human)?;
                log.header.condition = arm.condition;
                Ok((m, log))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut result = BatchResult::default();
    for ((sc, arm, seed), (m, log)) in work.iter().zip(outcomes) {
        result.episodes.push(EpisodeRow {
            scenario: sc.id.clone(),
            condition: arm.label.clone(),
            seed: *seed,
            success: m.success,
            ticks_to_goal: m.ticks_to_goal,
            total_human_inputs: m.total_human_inputs,
        });
        result.metrics.push(m);
        if keep_logs {
            result.logs.push(log);
        }
    }
    result.summary = summarize(&result.episodes);
    Ok(result)
}

/// One summary row per (scenario, condition) pair, in order of first appearance.
pub fn summarize(episodes: &[EpisodeRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in episodes {
        let key = (r.scenario.as_str(), r.condition.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(scenario, condition)| {
            let rows: Vec<&EpisodeRow> =
                episodes.iter().filter(|r| r.scenario == scenario && r.condition == condition).collect();
            let ticks: Vec<f64> = rows.iter().map(|r| r.ticks_to_goal as f64).collect();
            let inputs: Vec<f64> = rows.iter().map(|r| r.total_human_inputs as f64).collect();
            let (mt, st) = mean_std(&ticks);
            let (mi, si) = mean_std(&inputs);
            SummaryRow {
                scenario: scenario.to_owned(),
                condition: condition.to_owned(),
                n: rows.len(),
                success_rate: rows.iter().filter(|r| r.success).count() as f64 / rows.len() as f64,
                mean_ticks_to_goal: mt,
                std_ticks_to_goal: st,
                mean_total_human_inputs: mi,
                std_total_human_inputs: si,
            }
        })
        .collect()
}

/// Mean input magnitude per tick across episodes; episodes that already
/// finished contribute zero.
pub fn mean_input_series(metrics: &[&EpisodeMetrics]) -> Vec<f64> {
    let len = metrics.iter().map(|m| m.input_magnitude_series.len()).max().unwrap_or(0);
    (0..len)
        .map(|t| {
            let total: f64 = metrics.iter().map(|m| m.input_magnitude_series.get(t).copied().unwrap_or(0.0)).sum();
            total / metrics.len() as f64
        })
        .collect()
}
