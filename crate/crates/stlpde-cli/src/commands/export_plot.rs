//! `export-plot`: simulate a problem and dump its satisfaction geometry —
//! the trajectory, each atom's window and margin, and the profile lines
//! sampled on the mesh — ready for external plotting.

use std::path::PathBuf;

use stlpde::fem::{simulate, ControlTrajectory};
use stlpde::semantics::eval_robustness;
use stlpde::stl::StlFormula;

use crate::commands::{ensure_out, load_problem};
use crate::config::RunConfig;
use crate::output::{g9, read_control_csv, trajectory_csv, write_out};
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Problem description file.
    pub problem: PathBuf,
    /// Control history CSV (t,q); zero control when absent.
    #[arg(long)]
    pub control: Option<PathBuf>,
}

pub fn run(args: &Args, cfg: &RunConfig) -> Result<(), CliError> {
    let problem = load_problem(&args.problem, cfg)?;
    ensure_out(cfg)?;

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

    let mut atoms_csv = String::from("idx,op,t_lo,t_hi,x_lo,x_hi,cmp,slope,intercept,r_atom\n");
    let mut profiles_csv = String::from("idx,x,bound\n");
    for (idx, atom) in problem.formula.atoms().iter().enumerate() {
        let r = eval_robustness(&StlFormula::Atom(**atom), &traj)
            .map_err(|e| CliError::runtime(e.to_string()))?
            .value;
        atoms_csv.push_str(&format!(
            "{idx},{},{},{},{},{},{},{},{},{}\n",
            atom.op.letter(),
            g9(atom.t_lo),
            g9(atom.t_hi),
            g9(atom.pred.x_lo),
            g9(atom.pred.x_hi),
            atom.pred.cmp.symbol(),
            g9(atom.pred.slope),
            g9(atom.pred.intercept),
            g9(r),
        ));
        // The profile line at the section endpoints plus every mesh node
        // strictly between them.
        let mut line_xs = vec![atom.pred.x_lo];
        line_xs.extend(
            traj.xs.iter().copied().filter(|&x| atom.pred.x_lo < x && x < atom.pred.x_hi),
        );
        if atom.pred.x_hi > atom.pred.x_lo {
            line_xs.push(atom.pred.x_hi);
        }
        for x in line_xs {
            profiles_csv.push_str(&format!("{idx},{},{}\n", g9(x), g9(atom.pred.profile_at(x))));
        }
    }

    write_out(&cfg.out.join("trajectory.csv"), &trajectory_csv(&traj))?;
    write_out(&cfg.out.join("atoms.csv"), &atoms_csv)?;
    write_out(&cfg.out.join("profiles.csv"), &profiles_csv)?;
    println!(
        "exported {} atoms over a {}x{} grid",
        problem.formula.atoms().len(),
        problem.disc.nx,
        problem.disc.nt
    );
    Ok(())
}
