use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use commshare_core::sim::{replay, EpisodeLog, ReplayOutcome};

use crate::EXIT_DIVERGED;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Episode logs (JSONL).
    #[arg(required = true)]
    pub logs: Vec<PathBuf>,
}

pub fn check(path: &Path) -> anyhow::Result<ReplayOutcome> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let log = EpisodeLog::from_jsonl(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(replay(&log)?)
}

pub fn describe(outcome: &ReplayOutcome) -> String {
    match outcome {
        ReplayOutcome::Match => "match".to_owned(),
        ReplayOutcome::Diverged { tick, field } => format!("diverged at tick {tick} ({field})"),
    }
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let mut diverged = false;
    for path in &args.logs {
        let outcome = check(path)?;
        diverged |= outcome != ReplayOutcome::Match;
        if args.logs.len() == 1 {
            println!("{}", describe(&outcome));
        } else {
            println!("{}: {}", path.display(), describe(&outcome));
        }
    }
    Ok(if diverged { ExitCode::from(EXIT_DIVERGED) } else { ExitCode::SUCCESS })
}
