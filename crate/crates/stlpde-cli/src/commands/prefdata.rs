//! `prefdata`: win/lose preference pairs from baseline runs over many
//! problems.  Per-problem pair files come first, then one merged
//! `pairs.jsonl` and a summary, written last.

use std::path::PathBuf;

use serde::Serialize;
use stlpde::Problem;

use crate::commands::baseline::slot_stem;
use crate::commands::reason::{reason_core, ReasonOutput};
use crate::commands::{ensure_out, fan_out, load_problem};
use crate::config::RunConfig;
use crate::output::{g9, jsonl, write_json, write_out};
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Problem description files.
    #[arg(required = true)]
    pub problems: Vec<PathBuf>,
    /// Number of random subgoals per problem.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Cap on pairs per problem.
    #[arg(long, default_value_t = 64)]
    pub cap: usize,
}

#[derive(Serialize)]
struct Skipped {
    path: String,
    reason: String,
}

#[derive(Serialize)]
struct Summary {
    n_problems: usize,
    n_pairs: usize,
    /// Problems that produced no pairs: no room for subgoals, or no
    /// winner/loser contrast among the samples.
    skipped: Vec<Skipped>,
}

pub fn run(args: &Args, cfg: &RunConfig) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(CliError::input("--samples must be at least 1"));
    }
    if args.cap == 0 {
        return Err(CliError::input("--cap must be at least 1"));
    }
    let base_seed = cfg.require_seed()?;
    let problems: Vec<Problem> =
        args.problems.iter().map(|p| load_problem(p, cfg)).collect::<Result<_, _>>()?;
    ensure_out(cfg)?;

    let outcomes: Vec<Result<ReasonOutput, CliError>> = fan_out(problems.len(), cfg.jobs, |i| {
        let seed = base_seed.wrapping_add(i as u64);
        reason_core(&problems[i], args.samples, seed, cfg, 1, args.cap)
    });

    let mut merged = String::new();
    let mut skipped = Vec::new();
    let mut errors = Vec::new();
    let mut n_pairs = 0;
    for (i, outcome) in outcomes.iter().enumerate() {
        let path = args.problems[i].display().to_string();
        match outcome {
            Ok(out) => {
                let part = jsonl(&out.pairs);
                let name = format!("{}.pairs.jsonl", slot_stem(i, &args.problems[i]));
                write_out(&cfg.out.join(name), &part)?;
                merged.push_str(&part);
                n_pairs += out.pairs.len();
                if out.pairs.is_empty() {
                    let reason = match (&out.stats.note, out.stats.success_rate) {
                        (Some(note), _) => note.clone(),
                        (None, Some(p)) => {
                            format!("no winner/loser contrast (success rate {})", g9(p))
                        }
                        (None, None) => "no pairs".to_string(),
                    };
                    skipped.push(Skipped { path, reason });
                }
            }
            Err(e) => errors.push(format!("{path}: {e}")),
        }
    }
    write_out(&cfg.out.join("pairs.jsonl"), &merged)?;
    let summary = Summary { n_problems: problems.len(), n_pairs, skipped };
    write_json(&cfg.out.join("prefdata.json"), &summary)?;

    println!(
        "{} pairs from {} problems ({} skipped)",
        summary.n_pairs,
        summary.n_problems,
        summary.skipped.len()
    );
    if !errors.is_empty() {
        return Err(CliError::runtime(errors.join("; ")));
    }
    Ok(())
}
