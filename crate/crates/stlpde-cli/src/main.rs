//! `stlpde` — command-line front end over the library: solve and simulate
//! rod control problems, run the subgoal baseline, generate datasets, and
//! score candidate formalizations.
//!
//! Every command reads its settings from global flags, an optional JSON
//! config file, and the `STLPDE_SOLVER` environment variable, in that order
//! of precedence (see [`config`]).  Outputs land in the `--out` directory
//! and are byte-stable across reruns, wall-time fields aside.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{GlobalArgs, RunConfig};

/// Exit-code contract: 0 success, 2 input or validation error, 3 solver or
/// runtime failure.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Runtime(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> CliError {
        CliError::Input(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> CliError {
        CliError::Runtime(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

#[derive(Parser)]
#[command(name = "stlpde", version, about = "Temporal-logic-constrained control of 1D rod PDEs")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the robustness-optimal control for a problem file.
    Solve(commands::solve::Args),
    /// Integrate a problem under a given (or zero) control history.
    Simulate(commands::simulate::Args),
    /// Sample random subgoals for one problem and score them against the
    /// direct solve.
    Reason(commands::reason::Args),
    /// Run the random-subgoal baseline over many problems.
    Baseline(commands::baseline::Args),
    /// Sample a synthetic dataset of rod problems with natural-language,
    /// math, and constraint texts.
    Datagen(commands::datagen::Args),
    /// Intersection-over-union of two problems' satisfying regions.
    Iou(commands::iou::Args),
    /// Score a batch of candidate formalizations against ground truth.
    Eval(commands::eval::Args),
    /// Build win/lose formula pairs from baseline runs over many problems.
    Prefdata(commands::prefdata::Args),
    /// Export per-atom window, profile, and margin data for plotting.
    ExportPlot(commands::export_plot::Args),
    /// Solve a model in LP format and write a plain solution file.
    LpSolve(commands::lp_solve::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&cli.global)?;
    match &cli.command {
        Command::Solve(a) => commands::solve::run(a, &cfg),
        Command::Simulate(a) => commands::simulate::run(a, &cfg),
        Command::Reason(a) => commands::reason::run(a, &cfg),
        Command::Baseline(a) => commands::baseline::run(a, &cfg),
        Command::Datagen(a) => commands::datagen::run(a, &cfg),
        Command::Iou(a) => commands::iou::run(a, &cfg),
        Command::Eval(a) => commands::eval::run(a, &cfg),
        Command::Prefdata(a) => commands::prefdata::run(a, &cfg),
        Command::ExportPlot(a) => commands::export_plot::run(a, &cfg),
        Command::LpSolve(a) => commands::lp_solve::run(a, &cfg),
    }
}
