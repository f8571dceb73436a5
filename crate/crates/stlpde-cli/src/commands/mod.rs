//! One module per subcommand, plus the shared problem loader.

pub mod baseline;
pub mod datagen;
pub mod eval;
pub mod export_plot;
pub mod iou;
pub mod lp_solve;
pub mod prefdata;
pub mod reason;
pub mod simulate;
pub mod solve;

use std::path::Path;

use stlpde::Problem;

use crate::config::RunConfig;
use crate::CliError;

/// Load a problem file, apply grid overrides, and reject formulas that do
/// not fit the rod or the horizon.
pub fn load_problem(path: &Path, cfg: &RunConfig) -> Result<Problem, CliError> {
    let mut problem = Problem::from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if let Some(nx) = cfg.nx {
        problem.disc.nx = nx;
    }
    if let Some(nt) = cfg.nt {
        problem.disc.nt = nt;
    }
    problem.disc.validate().map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let report = problem.validity();
    if !report.valid {
        return Err(CliError::input(format!("{}: {}", path.display(), report.issues.join("; "))));
    }
    Ok(problem)
}

/// Create the output directory (and parents) before the first write.
pub fn ensure_out(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", cfg.out.display())))
}

/// Run `job` for indices `0..n` across a pool of `jobs` workers and collect
/// the results in input order, so the merged output does not depend on the
/// pool size.
pub fn fan_out<T: Send>(n: usize, jobs: usize, job: impl Fn(usize) -> T + Sync) -> Vec<T> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let cursor = AtomicUsize::new(0);
    let workers = jobs.clamp(1, n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                *slots[i].lock().unwrap() = Some(job(i));
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every index ran"))
        .collect()
}
