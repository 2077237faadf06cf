//! `fracwave run` executes an experiment config; `fracwave report` summarizes a results directory.

mod fsio;
mod report;
mod run;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fracwave", version, about = "Numerical laboratory for fractional Schrödinger operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment of a JSON config and write CSV results.
    Run {
        config: PathBuf,
        /// Output directory; defaults to the config's output_dir, then ./fracwave-out.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long, env = "FRACWAVE_JOBS")]
        jobs: Option<usize>,
    },
    /// Merge the CSVs of a results directory into a claims-vs-fits report.
    Report { dir: PathBuf },
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    Validation = 1,
    Acceptance = 2,
    Internal = 3,
}

/// An error with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn validation(m: impl Into<String>) -> Self {
        Self { status: Status::Validation, message: m.into() }
    }

    pub fn internal(m: impl Into<String>) -> Self {
        Self { status: Status::Internal, message: m.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, jobs } => run::run(&config, out.as_deref(), jobs),
        Command::Report { dir } => report::report(&dir).map(|_| Status::Pass),
    };
    match result {
        Ok(s) => ExitCode::from(s as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status as u8)
        }
    }
}
