//! Command-line front end for the `casimir` binary.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use args::{Cli, Command};
use error::CliError;

/// Resolve the configuration and run the selected subcommand, inside a
/// dedicated thread pool when `--threads` is given.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = config::resolve(cli.command.args())?;
    let go = || match &cli.command {
        Command::Spectrum(_) => commands::spectrum(&cfg),
        Command::Force(_) => commands::force(&cfg),
        Command::Converge(_) => commands::converge(&cfg),
        Command::Sample(_) => commands::sample(&cfg),
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))?
            .install(go),
        None => go(),
    }
}
