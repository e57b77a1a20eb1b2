//! Command-line front end for `opjump-core`.
//!
//! Every subcommand writes deterministic CSV or JSON: numbers are printed in
//! scientific notation with a fixed number of significant digits, and
//! parallel work is reassembled in grid order before writing.

pub mod args;
pub mod commands;
pub mod error;
pub mod format;
pub mod verify;

use args::{Cli, Command};
use error::CliResult;

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Iterate(a) => commands::iterate::run(a),
        Command::Oracle(a) => commands::oracle::run(a),
        Command::Verify(a) => commands::verify::run(a),
        Command::Scan(a) => commands::scan::run(a),
        Command::Asymptote(a) => commands::asymptote::run(a),
        Command::Taylor(a) => commands::taylor::run(a),
    }
}

/// Caps the rayon pool from `OPJUMP_THREADS`.
pub fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("OPJUMP_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| error::CliError::Usage(format!("OPJUMP_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| error::CliError::Usage(e.to_string()))?;
    }
    Ok(())
}
