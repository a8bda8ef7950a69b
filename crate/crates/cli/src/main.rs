use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = twodoor_cli::Cli::parse();
    match twodoor_cli::run(cli) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
