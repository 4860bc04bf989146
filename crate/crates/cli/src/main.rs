//! `featattr`: relevancy, explanations and attribution scores for JSON
//! model files.
//!
//! Exit codes: 0 success, 2 invalid input or usage, 3 computation failure.

mod args;
mod commands;
mod render;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

pub const THREADS_ENV: &str = "FEATATTR_THREADS";

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        anyhow::anyhow!("{THREADS_ENV} must be a non-negative integer, got {raw:?}")
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

/// Library errors carry their own classification; anything raised by the
/// CLI itself is a usage problem.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e
        .chain()
        .find_map(|c| c.downcast_ref::<featattr_core::Error>())
    {
        Some(inner) if !inner.is_input_error() => 3,
        _ => 2,
    }
}
