use std::process::ExitCode;

use commshare_core::library;

use crate::ScenarioDir;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub dir: ScenarioDir,
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    for sc in library::load_dir(args.dir.scenario_dir.as_deref())? {
        println!("{:<24} {}-D  {} stages  {}", sc.id, sc.dim(), sc.num_stages(), sc.description);
    }
    Ok(ExitCode::SUCCESS)
}
