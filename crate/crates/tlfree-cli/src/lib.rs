//! Command-line driver for the tlfree engine.
//!
//! Every subcommand reads JSON (inline or from a file), runs one engine
//! operation and writes JSON to stdout or to `--out`. Exit codes are 0 on
//! success, 1 on a domain error, 2 when a resource cap is hit, 3 when a
//! linear solve is rank deficient and 64 on a usage error.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod suite;

use clap::error::ErrorKind;
use clap::Parser;
use std::ffi::OsString;

pub use args::Cli;
pub use config::{Caps, RunConfig};
pub use error::{CliError, EXIT_DOMAIN, EXIT_OK, EXIT_RESOURCE, EXIT_SOLVER_RANK, EXIT_USAGE};

/// Parse, check caps, run and write output. Returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("tlfree: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    let outcome = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot build a pool of {n} threads: {e}")))?
            .install(|| commands::dispatch(&cfg))?,
        None => commands::dispatch(&cfg)?,
    };
    io::write_text(cfg.out.as_deref(), &outcome.output.render()?)?;
    match outcome.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}
