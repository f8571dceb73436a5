//! `simulate`: integrate the rod under a given (or zero) control history
//! and report the robustness of the resulting trajectory.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use stlpde::fem::{simulate, ControlTrajectory};
use stlpde::semantics::eval_robustness;

use crate::commands::{ensure_out, load_problem};
use crate::config::RunConfig;
use crate::output::{g9, read_control_csv, trajectory_csv, write_json, write_out};
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Problem description file.
    pub problem: PathBuf,
    /// Control history CSV (t,q); zero control when absent.
    #[arg(long)]
    pub control: Option<PathBuf>,
}

#[derive(Serialize)]
struct SimulateResult {
    status: &'static str,
    r: f64,
    wall_time_s: f64,
}

pub fn run(args: &Args, cfg: &RunConfig) -> Result<(), CliError> {
    let problem = load_problem(&args.problem, cfg)?;
    ensure_out(cfg)?;
    let started = Instant::now();

    let ctrl = match &args.control {
        Some(path) => read_control_csv(path, problem.disc.nt, problem.system.q_max)?,
        None => ControlTrajectory::zeros(problem.disc.nt, problem.system.q_max),
    };
    let u0 = problem
        .system
        .initial_nodes(problem.disc.nx)
        .map_err(|e| CliError::input(e.to_string()))?;
    let traj = simulate(&problem.system, &problem.disc, &ctrl, &u0)
        .map_err(|e| CliError::input(format!("{}: {e}", args.problem.display())))?;
    let r = eval_robustness(&problem.formula, &traj)
        .map_err(|e| CliError::runtime(e.to_string()))?
        .value;

    write_out(&cfg.out.join("trajectory.csv"), &trajectory_csv(&traj))?;
    let result =
        SimulateResult { status: "simulated", r, wall_time_s: started.elapsed().as_secs_f64() };
    write_json(&cfg.out.join("result.json"), &result)?;
    println!("simulated: r = {}", g9(r));
    Ok(())
}
