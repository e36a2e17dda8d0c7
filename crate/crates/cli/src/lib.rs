//! `commshare` command line: batch experiments, scenario validation, log
//! replay, metric export and the live session server.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
pub mod tables;

pub use commands::{batch, export, replay, scenarios, serve, validate};

/// Environment variable holding the default scenario directory.
pub const SCENARIO_DIR_ENV: &str = "COMMSHARE_SCENARIO_DIR";

/// Exit code of `replay` when a log does not reproduce.
pub const EXIT_DIVERGED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "commshare", version, about = "Shared autonomy with communicated goal inference")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run simulated episodes and write CSV tables plus per-episode logs.
    Batch(batch::Args),
    /// Check scenario files.
    Validate(validate::Args),
    /// Re-simulate logs and compare them tick by tick.
    Replay(replay::Args),
    /// Rebuild metric tables and input series from a directory of logs.
    Export(export::Args),
    /// List available scenarios.
    Scenarios(scenarios::Args),
    /// Serve live operator sessions.
    Serve(serve::Args),
}

#[derive(Debug, Clone, clap::Args)]
pub struct ScenarioDir {
    /// Directory searched for `<name>.json` before the shipped scenarios.
    #[arg(long, env = SCENARIO_DIR_ENV)]
    pub scenario_dir: Option<PathBuf>,
}

pub fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Batch(a) => batch::run(a),
        Command::Validate(a) => validate::run(a),
        Command::Replay(a) => replay::run(a),
        Command::Export(a) => export::run(a),
        Command::Scenarios(a) => scenarios::run(a),
        Command::Serve(a) => serve::run(a),
    }
}
