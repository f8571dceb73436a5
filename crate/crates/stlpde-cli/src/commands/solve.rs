//! `solve`: one problem file in, `result.json` plus `trajectory.csv` and
//! `control.csv` out — enough to re-draw satisfaction panels externally.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use stlpde::milp::{encode, solve_model, SolveStatus};

use crate::commands::{ensure_out, load_problem};
use crate::config::RunConfig;
use crate::output::{control_csv, g9, trajectory_csv, write_json, write_out};
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Problem description file.
    pub problem: PathBuf,
}

#[derive(Serialize)]
struct SolveResult {
    status: &'static str,
    r: Option<f64>,
    /// 0 for a proven optimum, the solver's bound gap for an incumbent,
    /// absent otherwise.
    gap: Option<f64>,
    combos_evaluated: u64,
    wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
}

pub fn run(args: &Args, cfg: &RunConfig) -> Result<(), CliError> {
    let problem = load_problem(&args.problem, cfg)?;
    ensure_out(cfg)?;

    let started = Instant::now();
    let model = encode(&problem.system, &problem.disc, &problem.formula)
        .map_err(|e| CliError::input(format!("{}: {e}", args.problem.display())))?;
    let outcome =
        solve_model(&model, &cfg.solver, cfg.budget).map_err(|e| CliError::runtime(e.to_string()))?;
    let wall = started.elapsed().as_secs_f64();

    let result = SolveResult {
        status: outcome.status.label(),
        r: outcome.objective,
        gap: match outcome.status {
            SolveStatus::Optimal => Some(0.0),
            SolveStatus::Feasible { gap } => Some(gap),
            _ => None,
        },
        combos_evaluated: outcome.combos_evaluated,
        wall_time_s: wall,
        message: outcome.message.clone(),
    };
    write_json(&cfg.out.join("result.json"), &result)?;
    if let Some(traj) = &outcome.trajectory {
        write_out(&cfg.out.join("trajectory.csv"), &trajectory_csv(traj))?;
    }
    if let Some(ctrl) = &outcome.control {
        let ts = problem.disc.ts(problem.system.tmax);
        write_out(&cfg.out.join("control.csv"), &control_csv(&ts, ctrl))?;
    }

    if matches!(outcome.status, SolveStatus::SolverFailed) {
        return Err(CliError::runtime(
            outcome.message.unwrap_or_else(|| "solver failed".to_string()),
        ));
    }
    println!(
        "{}: r = {} ({} combos, {:.2} s)",
        result.status,
        result.r.map_or_else(|| "-".to_string(), g9),
        result.combos_evaluated,
        wall,
    );
    Ok(())
}
