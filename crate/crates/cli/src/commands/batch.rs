use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::ValueEnum;
use commshare_core::sim::{run_batch, Arm};
use commshare_core::{library, Condition, EngineConfig, Rationality, Scenario};

use crate::tables::{self, EPISODES_FILE, SERIES_FILE, SUMMARY_FILE};
use crate::ScenarioDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConditionArg {
    Without,
    With,
    Ours,
}

impl From<ConditionArg> for Condition {
    fn from(c: ConditionArg) -> Self {
        match c {
            ConditionArg::Without => Condition::Without,
            ConditionArg::With => Condition::With,
            ConditionArg::Ours => Condition::Ours,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Scenario name or path to a scenario file; repeat for several.
    #[arg(long, required = true)]
    pub scenario: Vec<String>,
    /// Experimental condition; repeat for several. Defaults to all three.
    #[arg(long, value_enum)]
    pub condition: Vec<ConditionArg>,
    /// Episodes per (scenario, condition).
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Seed of the first episode; later ones count up from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Base engine config as JSON; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub alpha_step: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Skip the per-episode logs.
    #[arg(long)]
    pub no_logs: bool,
    #[command(flatten)]
    pub dir: ScenarioDir,
}

impl Args {
    pub fn base_config(&self) -> anyhow::Result<EngineConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => EngineConfig::default(),
        };
        if let Some(b) = self.beta {
            cfg.beta = Rationality::new(b)?;
        }
        if let Some(x) = self.alpha_min {
            cfg.alpha_min = x;
        }
        if let Some(x) = self.alpha_max {
            cfg.alpha_max = x;
        }
        if let Some(x) = self.alpha_step {
            cfg.alpha_step = x;
        }
        Ok(cfg)
    }

    pub fn conditions(&self) -> Vec<Condition> {
        if self.condition.is_empty() {
            Condition::ALL.to_vec()
        } else {
            self.condition.iter().map(|c| (*c).into()).collect()
        }
    }
}

pub fn log_name(scenario: &str, condition: &str, seed: u64) -> String {
    format!("{scenario}-{condition}-{seed}.jsonl")
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let scenarios: Vec<Scenario> = args
        .scenario
        .iter()
        .map(|s| library::resolve(s, args.dir.scenario_dir.as_deref()))
        .collect::<Result<_, _>>()?;
    let base = args.base_config()?;
    let arms: Vec<Arm> = args.conditions().into_iter().map(|c| Arm::from_condition(c, &base)).collect();

    let result = run_batch(&scenarios, &arms, args.trials, args.seed, args.jobs, !args.no_logs)?;

    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    tables::write_episodes(&args.out.join(EPISODES_FILE), &result.episodes)?;
    tables::write_summary(&args.out.join(SUMMARY_FILE), &result.summary)?;
    let tick_dt = |id: &str| scenarios.iter().find(|s| s.id == id).map_or(0.0, |s| s.tick_dt);
    tables::write_series(&args.out.join(SERIES_FILE), &result.episodes, &result.metrics, tick_dt)?;
    if !args.no_logs {
        let dir = args.out.join("logs");
        std::fs::create_dir_all(&dir)?;
        for (row, log) in result.episodes.iter().zip(&result.logs) {
            let path = dir.join(log_name(&row.scenario, &row.condition, row.seed));
            std::fs::write(&path, log.to_jsonl()).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    for r in &result.summary {
        println!(
            "{:<24} {:<8} n={:<4} success={:.2} ticks={:.1} inputs={:.1}",
            r.scenario, r.condition, r.n, r.success_rate, r.mean_ticks_to_goal, r.mean_total_human_inputs
        );
    }
    Ok(ExitCode::SUCCESS)
}
