use std::path::PathBuf;
use std::process::ExitCode;

use commshare_core::Scenario;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Scenario files to check.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let mut ok = true;
    for path in &args.files {
        match Scenario::load(path) {
            Ok(sc) => println!(
                "ok: {} ({}-D, {} goals, {} stages)",
                sc.id,
                sc.dim(),
                sc.goals.len(),
                sc.num_stages()
            ),
            Err(e) => {
                eprintln!("error: {e}");
                ok = false;
            }
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
