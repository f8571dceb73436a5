//! Run configuration: global flags, the optional JSON config file, and the
//! `STLPDE_SOLVER` environment variable, merged as flag > environment >
//! file > default.
//!
//! `STLPDE_SOLVER` holds either the word `builtin`/`external` or a full
//! external command template such as `scip {lp} {sol}`.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use stlpde::reasoning::Budgets;
use stlpde::SolverChoice;

use crate::CliError;

#[derive(Debug, Clone, clap::Args)]
pub struct GlobalArgs {
    /// JSON config file; command-line flags override its entries.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Solver backend: builtin or external.
    #[arg(long, global = true, value_name = "NAME")]
    pub solver: Option<String>,
    /// External solver command template, e.g. "scip {lp} {sol}".
    #[arg(long, global = true, value_name = "CMD")]
    pub solver_cmd: Option<String>,
    /// Wall-clock budget per solve, in seconds; unlimited when absent.
    #[arg(long, global = true, value_name = "S")]
    pub budget_s: Option<f64>,
    /// Wall-clock budget per subgoal solve, in seconds [default: 120].
    #[arg(long, global = true, value_name = "S")]
    pub subgoal_budget_s: Option<f64>,
    /// Override the problem's number of mesh elements.
    #[arg(long, global = true, value_name = "N")]
    pub nx: Option<usize>,
    /// Override the problem's number of time steps.
    #[arg(long, global = true, value_name = "N")]
    pub nt: Option<usize>,
    /// Random seed; required by sampling commands.
    #[arg(long, global = true, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Worker threads for commands that process many items.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Output directory [default: .].
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// File counterpart of the flags, all keys optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    solver: Option<String>,
    solver_cmd: Option<String>,
    budget_s: Option<f64>,
    subgoal_budget_s: Option<f64>,
    nx: Option<usize>,
    nt: Option<usize>,
    seed: Option<u64>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
}

/// Everything a command needs, precedence already applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub solver: SolverChoice,
    pub budget: Option<Duration>,
    pub subgoal_budget: Duration,
    pub nx: Option<usize>,
    pub nt: Option<usize>,
    seed: Option<u64>,
    pub jobs: usize,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<RunConfig, CliError> {
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        if args.solver.as_deref() == Some("builtin") && args.solver_cmd.is_some() {
            return Err(CliError::input(
                "--solver builtin contradicts --solver-cmd; pick one backend",
            ));
        }

        let env = std::env::var("STLPDE_SOLVER").ok().filter(|v| !v.is_empty());
        let (env_name, env_cmd) = match env.as_deref() {
            None => (None, None),
            Some("builtin") => (Some("builtin"), None),
            Some("external") => (Some("external"), None),
            Some(cmd) => (Some("external"), Some(cmd.to_string())),
        };

        let name =
            args.solver.as_deref().or(env_name).or(file.solver.as_deref()).unwrap_or("builtin");
        let cmd = args.solver_cmd.clone().or(env_cmd).or(file.solver_cmd.clone());
        let solver = match name {
            "builtin" => SolverChoice::default(),
            "external" => SolverChoice::External {
                cmd: cmd.ok_or_else(|| {
                    CliError::input("external solver selected but no --solver-cmd template given")
                })?,
            },
            other => {
                return Err(CliError::input(format!(
                    "unknown solver {other:?}; expected builtin or external"
                )))
            }
        };

        let budget = duration_opt("budget", args.budget_s.or(file.budget_s))?;
        let subgoal_budget =
            duration_opt("subgoal budget", args.subgoal_budget_s.or(file.subgoal_budget_s))?
                .unwrap_or(Duration::from_secs(120));

        Ok(RunConfig {
            solver,
            budget,
            subgoal_budget,
            nx: args.nx.or(file.nx),
            nt: args.nt.or(file.nt),
            seed: args.seed.or(file.seed),
            jobs: args.jobs.or(file.jobs).unwrap_or(1).max(1),
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(".")),
        })
    }

    /// Sampling commands must be seeded so their output is reproducible;
    /// everything else ignores the seed.
    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| {
            CliError::input("this command samples; pass --seed or set it in the config file")
        })
    }

    /// Solve budgets for the reasoning commands: the subgoal budget is its
    /// own flag, the direct solve falls back to ten minutes.
    pub fn reason_budgets(&self) -> Budgets {
        Budgets {
            solve: self.budget.unwrap_or(Duration::from_secs(600)),
            subgoal: self.subgoal_budget,
        }
    }
}

fn duration_opt(what: &str, seconds: Option<f64>) -> Result<Option<Duration>, CliError> {
    match seconds {
        None => Ok(None),
        Some(s) if s.is_finite() && s > 0.0 => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => {
            Err(CliError::input(format!("{what} must be a positive number of seconds, got {s}")))
        }
    }
}

fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("malformed config {}: {e}", path.display())))
}
