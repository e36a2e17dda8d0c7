use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use commshare_core::sim::{summarize, EpisodeLog, EpisodeRow};

use crate::tables::{self, EPISODES_FILE, SERIES_FILE, SUMMARY_FILE};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory of episode logs (`*.jsonl`).
    pub logs: PathBuf,
    /// Output directory for the tables.
    #[arg(long)]
    pub out: PathBuf,
}

/// Condition label of a log: the experimental condition for batch logs,
/// the operator kind otherwise.
pub fn label(log: &EpisodeLog) -> String {
    match log.header.condition {
        Some(c) => c.name().to_owned(),
        None => serde_json::to_value(log.header.human)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default(),
    }
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.logs)
        .with_context(|| format!("reading {}", args.logs.display()))?
        .flatten()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();

    let mut logs = Vec::with_capacity(paths.len());
    for p in &paths {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        logs.push(EpisodeLog::from_jsonl(&text).with_context(|| format!("parsing {}", p.display()))?);
    }
    logs.sort_by(|a, b| {
        (&a.header.scenario.id, label(a), a.header.seed).cmp(&(&b.header.scenario.id, label(b), b.header.seed))
    });

    let metrics: Vec<_> = logs.iter().map(|l| l.metrics()).collect();
    let rows: Vec<EpisodeRow> = logs
        .iter()
        .zip(&metrics)
        .map(|(l, m)| EpisodeRow {
            scenario: l.header.scenario.id.clone(),
            condition: label(l),
            seed: l.header.seed,
            success: m.success,
            ticks_to_goal: m.ticks_to_goal,
            total_human_inputs: m.total_human_inputs,
        })
        .collect();

    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    tables::write_episodes(&args.out.join(EPISODES_FILE), &rows)?;
    tables::write_summary(&args.out.join(SUMMARY_FILE), &summarize(&rows))?;
    let tick_dt = |id: &str| logs.iter().find(|l| l.header.scenario.id == id).map_or(0.0, |l| l.header.scenario.tick_dt);
    tables::write_series(&args.out.join(SERIES_FILE), &rows, &metrics, tick_dt)?;
    println!("{} logs exported to {}", logs.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}
