use std::process::ExitCode;

use clap::Parser;
use opjump_cli::args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = opjump_cli::configure_threads().and_then(|()| opjump_cli::run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("opjump: {e}");
            e.exit_code()
        }
    }
}
