//! `baseline`: the random-subgoal baseline over many problems, fanned out
//! across a worker pool.  Each problem gets its own stats file; the merged
//! report is written last.

use std::path::{Path, PathBuf};

use serde::Serialize;
use stlpde::Problem;

use crate::commands::reason::{reason_core, StatsOut};
use crate::commands::{ensure_out, fan_out, load_problem};
use crate::config::RunConfig;
use crate::output::{g9, write_json};
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Problem description files.
    #[arg(required = true)]
    pub problems: Vec<PathBuf>,
    /// Number of random subgoals per problem.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Serialize)]
struct ProblemReport {
    path: String,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<StatsOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct MergedReport {
    n_problems: usize,
    /// Mean over the problems whose rate is defined; null when none is.
    mean_success_rate: Option<f64>,
    problems: Vec<ProblemReport>,
}

/// File-name stem for per-problem outputs; the index keeps same-named
/// inputs from different directories apart.
pub fn slot_stem(index: usize, path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".to_string());
    format!("{index:03}_{stem}")
}

pub fn run(args: &Args, cfg: &RunConfig) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(CliError::input("--samples must be at least 1"));
    }
    let base_seed = cfg.require_seed()?;
    // Reject bad inputs before spending solver time on any of them.
    let problems: Vec<Problem> =
        args.problems.iter().map(|p| load_problem(p, cfg)).collect::<Result<_, _>>()?;
    ensure_out(cfg)?;

    // Problem-level fan-out; each baseline evaluates its samples
    // sequentially so the pool is the only parallelism.
    let reports: Vec<ProblemReport> = fan_out(problems.len(), cfg.jobs, |i| {
        let seed = base_seed.wrapping_add(i as u64);
        let path = args.problems[i].display().to_string();
        match reason_core(&problems[i], args.samples, seed, cfg, 1, 0) {
            Ok(out) => ProblemReport { path, seed, stats: Some(out.stats), error: None },
            Err(e) => ProblemReport { path, seed, stats: None, error: Some(e.to_string()) },
        }
    });

    for (i, report) in reports.iter().enumerate() {
        let name = format!("{}.stats.json", slot_stem(i, &args.problems[i]));
        write_json(&cfg.out.join(name), report)?;
    }
    let defined: Vec<f64> =
        reports.iter().filter_map(|r| r.stats.as_ref().and_then(|s| s.success_rate)).collect();
    let merged = MergedReport {
        n_problems: reports.len(),
        mean_success_rate: (!defined.is_empty())
            .then(|| defined.iter().sum::<f64>() / defined.len() as f64),
        problems: reports,
    };
    write_json(&cfg.out.join("baseline.json"), &merged)?;

    println!(
        "{} problems, mean success rate {}",
        merged.n_problems,
        merged.mean_success_rate.map_or_else(|| "-".to_string(), g9),
    );
    let failed = merged.problems.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        return Err(CliError::runtime(format!(
            "{failed} of {} baseline runs failed; see baseline.json",
            merged.n_problems
        )));
    }
    Ok(())
}
