//! `iou`: score a candidate problem's formula against a ground truth's,
//! over the truth's rod and horizon.  Prints one JSON line.

use std::path::PathBuf;

use stlpde::metrics::iou;
use stlpde::Problem;

use crate::commands::load_problem;
use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Ground-truth problem file.
    #[arg(long)]
    pub truth: PathBuf,
    /// Candidate problem file.
    #[arg(long)]
    pub cand: PathBuf,
}

pub fn run(args: &Args, cfg: &RunConfig) -> Result<(), CliError> {
    let truth = load_problem(&args.truth, cfg)?;
    // The candidate only contributes its formula; domain fit is judged
    // against the truth's system, so skip the loader's validity gate.
    let cand = Problem::from_path(&args.cand)
        .map_err(|e| CliError::input(format!("{}: {e}", args.cand.display())))?;
    let score = iou(&truth.formula, Some(&cand.formula), &truth.system)
        .map_err(|e| CliError::input(e.to_string()))?;
    println!("{}", serde_json::to_string(&score).expect("score serializes"));
    Ok(())
}
