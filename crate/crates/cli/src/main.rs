mod args;
mod commands;
mod config;
mod error;
mod output;

use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;

/// `INFOFLOW_THREADS` caps the worker pool.
fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("INFOFLOW_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("INFOFLOW_THREADS={value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = configure_threads().and_then(|_| commands::run(cli.command)) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
