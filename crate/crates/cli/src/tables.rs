//! CSV outputs. Column order is part of the interface.

use std::path::Path;

use anyhow::Context;
use commshare_core::sim::{mean_input_series, EpisodeMetrics, EpisodeRow, SummaryRow};

pub const EPISODE_COLUMNS: [&str; 6] =
    ["scenario", "condition", "seed", "success", "ticks_to_goal", "total_human_inputs"];

pub const SUMMARY_COLUMNS: [&str; 8] = [
    "scenario",
    "condition",
    "n",
    "success_rate",
    "mean_ticks_to_goal",
    "std_ticks_to_goal",
    "mean_total_human_inputs",
    "std_total_human_inputs",
];

pub const SERIES_COLUMNS: [&str; 5] = ["scenario", "condition", "t", "time_s", "mean_input_magnitude"];

pub const EPISODES_FILE: &str = "episodes.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SERIES_FILE: &str = "series.csv";

fn writer(path: &Path, header: &[&str]) -> anyhow::Result<csv::Writer<std::fs::File>> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    Ok(w)
}

pub fn write_episodes(path: &Path, rows: &[EpisodeRow]) -> anyhow::Result<()> {
    let mut w = writer(path, &EPISODE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.condition.clone(),
            r.seed.to_string(),
            r.success.to_string(),
            r.ticks_to_goal.to_string(),
            r.total_human_inputs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> anyhow::Result<()> {
    let mut w = writer(path, &SUMMARY_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.condition.clone(),
            r.n.to_string(),
            r.success_rate.to_string(),
            r.mean_ticks_to_goal.to_string(),
            r.std_ticks_to_goal.to_string(),
            r.mean_total_human_inputs.to_string(),
            r.std_total_human_inputs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-tick mean input magnitude for each (scenario, condition) group.
/// `tick_dt` maps a scenario id to its tick length in seconds.
pub fn write_series(
    path: &Path,
    rows: &[EpisodeRow],
    metrics: &[EpisodeMetrics],
    tick_dt: impl Fn(&str) -> f64,
) -> anyhow::Result<()> {
    let mut w = writer(path, &SERIES_COLUMNS)?;
    let mut groups: Vec<(&str, &str)> = Vec::new();
    for r in rows {
        let key = (r.scenario.as_str(), r.condition.as_str());
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    for (scenario, condition) in groups {
        let members: Vec<&EpisodeMetrics> = rows
            .iter()
            .zip(metrics)
            .filter(|(r, _)| r.scenario == scenario && r.condition == condition)
            .map(|(_, m)| m)
            .collect();
        let dt = tick_dt(scenario);
        for (t, v) in mean_input_series(&members).into_iter().enumerate() {
            w.write_record([
                scenario.to_owned(),
                condition.to_owned(),
                t.to_string(),
                (t as f64 * dt).to_string(),
                v.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
