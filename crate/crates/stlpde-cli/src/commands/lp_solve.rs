//! `lp-solve`: solve a model in LP format with the in-process solver and
//! write its solution in the plain `name value` exchange dialect.  This
//! makes the binary its own stand-in external solver:
//! `--solver external --solver-cmd "stlpde lp-solve {lp} {sol}"`.

use std::path::PathBuf;

use stlpde::milp::{solve_lp_text, BuiltinOptions, MilpError};

use crate::config::RunConfig;
use crate::output::write_out;
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// LP model file.
    pub lp: PathBuf,
    /// Solution file to write; stdout when absent.
    pub sol: Option<PathBuf>,
}

pub fn run(args: &Args, _cfg: &RunConfig) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.lp)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", args.lp.display())))?;
    let sol = solve_lp_text(&text, BuiltinOptions::default().combo_limit).map_err(|e| match e {
        MilpError::LpParse(_) => CliError::input(e.to_string()),
        other => CliError::runtime(other.to_string()),
    })?;

    let mut out = String::new();
    if sol.feasible {
        out.push_str(&format!("objective {}\n", sol.objective));
        for (name, value) in &sol.values {
            out.push_str(&format!("{name} {value}\n"));
        }
    } else {
        out.push_str("status infeasible\n");
    }
    match &args.sol {
        Some(path) => write_out(path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}
