mod args;
mod commands;
mod config;
mod output;
mod repro;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use crate::args::Cli;

pub const EXIT_PRECONDITION: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

/// A command line that parses but does not describe a valid request.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        EXIT_USAGE
    } else if let Some(e) = err.downcast_ref::<supercrit::Error>() {
        if e.is_numerical() {
            EXIT_NUMERICAL
        } else {
            EXIT_PRECONDITION
        }
    } else {
        EXIT_PRECONDITION
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let env_bits = match config::precision_from_env() {
        Ok(bits) => bits,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PRECONDITION);
        }
    };
    match commands::run(&cli, env_bits) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            if let Some(usage) = e.downcast_ref::<UsageError>() {
                let _ = Cli::command().error(ErrorKind::ValueValidation, usage).print();
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}
