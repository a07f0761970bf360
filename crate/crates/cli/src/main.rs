//! Command-line front end for the penalty-dynamics toolkit.
//!
//! Exit codes: 0 all enabled verdicts pass, 1 execution error, 2 verdict
//! failure, 3 inconclusive (check-h only).

mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::check_h::{cmd_check_h, CheckHArgs};
use commands::compare::{cmd_compare, CompareArgs};
use commands::run::{cmd_run, RunArgs};
use commands::sweep::{cmd_sweep, SweepArgs};

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    pub fn execution(message: String) -> CliError {
        CliError {
            message,
            code: commands::EXIT_ERROR,
        }
    }
}

impl<E: Into<penalty_flow::CoreError>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::execution(e.into().to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "penalty-flow",
    about = "Simulate damped second-order penalty dynamics for constrained convex \
             minimization and verify the convergence conclusions numerically",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonIo {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to the config's output_dir, then ".").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the integration horizon / quadrature upper limit.
    #[arg(long)]
    tmax: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one problem and write trajectory.csv, energy.csv,
    /// report.json (and optionally trajectory.svg).
    Run {
        #[command(flatten)]
        io: CommonIo,
        /// Terminal tolerance for the convergence verdicts.
        #[arg(long)]
        tol: Option<f64>,
        /// Also write a static SVG chart of the trajectory.
        #[arg(long)]
        plot: bool,
    },
    /// Evaluate the conjugate-integrability condition for each direction.
    CheckH {
        #[command(flatten)]
        io: CommonIo,
    },
    /// Run the second-order system and the first-order baseline side by side.
    Compare {
        #[command(flatten)]
        io: CommonIo,
        /// Agreement tolerance between the two terminal points (and z*).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Map terminal error and growth feasibility over a (gamma, alpha) grid.
    Sweep {
        #[command(flatten)]
        io: CommonIo,
        /// Worker threads for independent cells (default: all available).
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { io, tol, plot } => cmd_run(&RunArgs {
            config: io.config,
            out: io.out,
            tmax: io.tmax,
            tol,
            plot,
        }),
        Command::CheckH { io } => cmd_check_h(&CheckHArgs {
            config: io.config,
            out: io.out,
            tmax: io.tmax,
        }),
        Command::Compare { io, tol } => cmd_compare(&CompareArgs {
            config: io.config,
            out: io.out,
            tmax: io.tmax,
            tol,
        }),
        Command::Sweep { io, workers } => cmd_sweep(&SweepArgs {
            config: io.config,
            out: io.out,
            tmax: io.tmax,
            workers,
        }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
