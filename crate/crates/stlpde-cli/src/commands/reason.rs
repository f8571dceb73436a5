//! `reason`: sample random subgoals for one problem, score each against the
//! direct solve, and emit aggregate stats plus win/lose preference pairs.
//! The batch commands reuse [`reason_core`] per problem.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use stlpde::reasoning::{
    build_preference_pairs, run_baseline, sample_subgoal, BaselineConfig, Difficulty,
    ReasoningError,
};
use stlpde::stl::{print_cspec, print_mathform};
use stlpde::{render_nl, Problem};

use crate::commands::{ensure_out, load_problem};
use crate::config::RunConfig;
use crate::output::{g9, jsonl, write_json, write_out};
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Problem description file.
    pub problem: PathBuf,
    /// Number of random subgoals to draw.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Cap on emitted preference pairs.
    #[arg(long, default_value_t = 64)]
    pub pairs_cap: usize,
}

/// The `stats.json` payload.  Aggregates are null when the target starts
/// too close to t = 0 to leave room for any subgoal.
#[derive(Serialize)]
pub struct StatsOut {
    pub success_rate: Option<f64>,
    pub utility_gain: Option<f64>,
    pub difficulty: Option<Difficulty>,
    pub n_samples: usize,
    pub n_excluded: usize,
    pub r_direct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One `pairs.jsonl` line.
#[derive(Serialize)]
pub struct PairLine {
    pub nl: String,
    pub anchor_cspec: String,
    pub winner_cspec: String,
    pub loser_cspec: String,
    pub r_direct: f64,
    pub r_winner: f64,
    pub r_loser: f64,
    pub seed: u64,
}

pub struct ReasonOutput {
    pub stats: StatsOut,
    pub pairs: Vec<PairLine>,
}

/// English description of the problem when it matches the generator's
/// two-half rod template; its math text otherwise.
fn describe(problem: &Problem) -> String {
    if problem.system.materials.len() == 2 {
        render_nl(&problem.system, &problem.formula)
    } else {
        print_mathform(&problem.formula)
    }
}

/// Run the baseline for one problem.  A `pairs_cap` of 0 skips pair
/// building; a run whose samples all land on one side of the direct solve
/// yields no pairs rather than an error.
pub fn reason_core(
    problem: &Problem,
    samples: usize,
    seed: u64,
    cfg: &RunConfig,
    jobs: usize,
    pairs_cap: usize,
) -> Result<ReasonOutput, CliError> {
    // A throwaway draw tells us whether the target leaves room for any
    // subgoal at all, before paying for the direct solve.
    let probe = sample_subgoal(
        &problem.formula,
        &problem.system,
        &problem.disc,
        &mut ChaCha8Rng::seed_from_u64(0),
    );
    if let Err(e @ ReasoningError::NoPreWindow { .. }) = probe {
        return Ok(ReasonOutput {
            stats: StatsOut {
                success_rate: None,
                utility_gain: None,
                difficulty: None,
                n_samples: samples,
                n_excluded: samples,
                r_direct: None,
                note: Some(e.to_string()),
            },
            pairs: Vec::new(),
        });
    }

    let bcfg = BaselineConfig {
        n_samples: samples,
        seed,
        solver: cfg.solver.clone(),
        budgets: cfg.reason_budgets(),
        jobs,
    };
    let run = run_baseline(&problem.system, &problem.disc, &problem.formula, &bcfg)
        .map_err(|e| CliError::runtime(e.to_string()))?;

    let stats = StatsOut {
        success_rate: Some(run.stats.success_rate),
        utility_gain: (run.stats.n_excluded < run.stats.n_samples)
            .then_some(run.stats.utility_gain),
        difficulty: Some(run.stats.difficulty),
        n_samples: run.stats.n_samples,
        n_excluded: run.stats.n_excluded,
        r_direct: Some(run.stats.r_direct),
        note: None,
    };

    let mut pairs = Vec::new();
    if pairs_cap > 0 {
        match build_preference_pairs(&run.samples, pairs_cap) {
            Ok(found) => {
                let nl = describe(problem);
                for p in found {
                    pairs.push(PairLine {
                        nl: nl.clone(),
                        anchor_cspec: problem.cspec.clone(),
                        winner_cspec: print_cspec(&p.winner).1,
                        loser_cspec: print_cspec(&p.loser).1,
                        r_direct: p.r_direct,
                        r_winner: p.r_winner,
                        r_loser: p.r_loser,
                        seed,
                    });
                }
            }
            Err(ReasoningError::NoPairs { .. }) => {}
            Err(e) => return Err(CliError::runtime(e.to_string())),
        }
    }
    Ok(ReasonOutput { stats, pairs })
}

pub fn run(args: &Args, cfg: &RunConfig) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(CliError::input("--samples must be at least 1"));
    }
    let seed = cfg.require_seed()?;
    let problem = load_problem(&args.problem, cfg)?;
    ensure_out(cfg)?;

    let out = reason_core(&problem, args.samples, seed, cfg, cfg.jobs, args.pairs_cap)?;
    write_json(&cfg.out.join("stats.json"), &out.stats)?;
    write_out(&cfg.out.join("pairs.jsonl"), &jsonl(&out.pairs))?;

    match out.stats.success_rate {
        Some(p) => println!(
            "success rate {} over {} samples ({} pairs)",
            g9(p),
            out.stats.n_samples,
            out.pairs.len()
        ),
        None => println!("no room for subgoals: {}", out.stats.note.as_deref().unwrap_or("")),
    }
    Ok(())
}
