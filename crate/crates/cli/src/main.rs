//! `kdq`: build, evolve and verify Kirkwood-Dirac distributions from the shell.
//!
//! Exit codes: 0 on success, 2 on invalid input (error JSON on stderr),
//! 3 when a dimension, path-space or sample cap is exceeded.

mod args;
mod commands;
mod error;
mod output;
mod specs;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => fail(CliError::Usage(e.to_string())),
    };
    if let Err(e) = commands::run(&cli) {
        fail(e);
    }
}

fn fail(e: CliError) -> ! {
    eprintln!("{}", e.to_json());
    std::process::exit(e.exit_code());
}
