use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ExitCode::from(sbm_cli::run(&sbm_cli::Cli::parse()))
}
