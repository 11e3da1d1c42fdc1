//! Batch experiment runner: deterministic Monte Carlo for cell suprema,
//! Gumbel/accompanying-law tables, confidence bands, increment simulation,
//! Lévy tails and the small-time diagnostic.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric guard tripped.
//! Errors are emitted as JSON on stderr.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use levyband_core::Error as CoreError;
use serde::Serialize;

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub exit: u8,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { kind: "config", message: message.into(), exit: 2 }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self { kind: "numeric", message: message.into(), exit: 3 }
    }

    pub fn from_core(err: CoreError) -> Self {
        match err {
            CoreError::Numeric(m) => CliError::numeric(m),
            CoreError::Domain(m) | CoreError::Invalid(m) => CliError::config(m),
        }
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
}

#[derive(Parser)]
#[command(name = "levyband", version, about = "Lévy density projection estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Path to the JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads (0 = library default). Affects wall time only.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo cell suprema plus tail comparisons.
    McSup,
    /// Gumbel / accompanying-law tables and CDF distances.
    Gumbel,
    /// Confidence band (reps = 1) or coverage experiment (reps > 1).
    Band,
    /// Simulate an increment sample to CSV + JSON sidecar.
    Simulate,
    /// Lévy density and jump-measure tail on a grid.
    Tails,
    /// Small-time property diagnostic over a list of steps.
    Smalltime,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        // worker count must never change results, only wall time
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let report =
                ErrorReport { error: ErrorBody { kind: err.kind, message: &err.message } };
            eprintln!("{}", serde_json::to_string(&report).unwrap());
            ExitCode::from(err.exit)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("--config <path> is required"))?;
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    match cli.command {
        Command::McSup => commands::mc_sup::run(&raw, cli.seed, &cli.out),
        Command::Gumbel => commands::gumbel::run(&raw, cli.seed, &cli.out),
        Command::Band => commands::band::run(&raw, cli.seed, &cli.out),
        Command::Simulate => commands::simulate::run(&raw, cli.seed, &cli.out),
        Command::Tails => commands::tails::run(&raw, &cli.out),
        Command::Smalltime => commands::smalltime::run(&raw, &cli.out),
    }
}

pub(crate) fn parse<T: serde::de::DeserializeOwned>(raw: &str) -> Result<T, CliError> {
    serde_json::from_str(raw).map_err(|e| CliError::config(format!("bad config: {e}")))
}
