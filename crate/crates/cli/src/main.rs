//! `km2o`: stationarity classification and regime-switching backtests of
//! daily closing prices.

mod commands;
mod config;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::commands::Command;
use crate::config::Overrides;

#[derive(Debug, Parser)]
#[command(name = "km2o", version, about, propagate_version = true)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    /// More log output; repeat for debug detail
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

/// 0 success, 1 invalid input or configuration, 2 file system failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    let io = err.chain().any(|e| {
        e.downcast_ref::<std::io::Error>().is_some() || e.downcast_ref::<km2o_core::Error>().is_some_and(|e| e.is_io())
    });
    if io {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match commands::run(cli.command, &cli.overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
