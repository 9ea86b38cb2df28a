//! `wallkit`: command-line front end.
//!
//! Every subcommand prints one JSON document on standard output. Exit status 0 means
//! success, 1 means the input was well formed but the checked property fails, and 2
//! means the input or the command line could not be used.

use std::fmt::Display;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

mod commands;
mod input;

use commands::Command;

#[derive(Parser, Debug)]
#[command(name = "wallkit", version, about = "Discrete length and area on surfaces")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

/// An input the command cannot work with. Always exit status 2.
#[derive(Debug)]
pub struct Failure(pub String);

impl Failure {
    pub fn input(e: impl Display) -> Self {
        Failure(e.to_string())
    }
}

/// A finished command: its payload and whether the checked property holds.
pub struct Outcome {
    pub payload: Value,
    pub pass: bool,
}

impl Outcome {
    pub fn ok(payload: Value) -> Self {
        Outcome { payload, pass: true }
    }

    pub fn check(payload: Value, pass: bool) -> Self {
        Outcome { payload, pass }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("WALLKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| Failure(format!("WALLKIT_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(Failure("WALLKIT_THREADS must be at least 1".into()));
    }
    // A second initialization only fails if a pool already exists, which it cannot here.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn report_failure(msg: &str) -> ExitCode {
    eprintln!("wallkit: {msg}");
    println!("{}", json!({ "error": msg }));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("usage error").trim_start_matches("error: ");
            println!("{}", json!({ "error": first }));
            return ExitCode::from(2);
        }
    };
    if let Err(Failure(msg)) = configure_threads() {
        return report_failure(&msg);
    }
    let seed = cli.seed;
    let result = panic::catch_unwind(AssertUnwindSafe(|| commands::run(cli.command, seed)));
    match result {
        Ok(Ok(out)) => {
            println!("{}", out.payload);
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Ok(Err(Failure(msg))) => report_failure(&msg),
        Err(_) => report_failure("internal error while processing the input"),
    }
}
