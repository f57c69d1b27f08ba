mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use crate::commands::Outcome;
use crate::config::{Cli, RunConfig};

/// Usage errors exit with 2, failed runs with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<fracsym::Error> for CliError {
    fn from(e: fracsym::Error) -> Self {
        match e {
            fracsym::Error::Parameter(msg) => CliError::Usage(msg),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, flags) = cli.command.split();
    let result = RunConfig::new(kind, flags).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
