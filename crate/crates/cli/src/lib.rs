//! Command-line front end for `torus-wigner`.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::Cli;
pub use error::{CliError, CliResult};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "TORUS_WIGNER_THREADS";

fn thread_pool() -> CliResult<Option<rayon::ThreadPool>> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Runs a parsed command, honouring the thread cap.
pub fn run(cli: &Cli) -> CliResult<Vec<String>> {
    match thread_pool()? {
        Some(pool) => pool.install(|| commands::run(cli)),
        None => commands::run(cli),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(lines) => {
            let mut out = std::io::stdout().lock();
            for l in lines {
                if writeln!(out, "{l}").is_err() {
                    break;
                }
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
