//! Command-line harness for `shiftdim-core`: file formats, JSON reports and
//! the `shiftdim` subcommands.

pub mod commands;
pub mod formats;
pub mod report;
mod verify;

use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;

use commands::Cli;

/// Environment variable that sets the worker count.
pub const THREADS_ENV: &str = "SHIFTDIM_THREADS";

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Error = 1,
    VerificationFailed = 2,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().with_context(|| format!("{THREADS_ENV} must be a positive integer"))?;
        shiftdim_core::par::set_worker_count(n)?;
    }
    Ok(())
}

/// Runs one invocation and writes its report; the caller maps the result to
/// an exit status.
pub fn run(cli: &Cli) -> Result<Exit> {
    configure_threads()?;
    let start = Instant::now();
    let outcome = commands::execute(&cli.command)?;
    let json = outcome.report.to_json(start.elapsed().as_secs_f64());
    let text = report::render(&json);
    match &cli.out {
        Some(path) => report::write_text(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &cli.csv {
        outcome.report.write_csv(path)?;
    }
    Ok(if outcome.failed { Exit::VerificationFailed } else { Exit::Ok })
}

/// Full entry point: parse `argv`, run, print errors as one line.
pub fn main_with_args<I, T>(argv: I) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                let _ = e.print();
                return Exit::Ok;
            }
            let msg = e.render().to_string();
            eprintln!("{} (see --help)", msg.lines().next().unwrap_or("invalid arguments"));
            return Exit::Error;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            Exit::Error
        }
    }
}
