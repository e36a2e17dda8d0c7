use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = commshare_cli::Cli::parse();
    match commshare_cli::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
