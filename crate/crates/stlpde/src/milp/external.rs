//! Subprocess adapter for LP-file-consuming solvers.
//!
//! The command template is split on whitespace (no shell), with `{lp}` and
//! `{sol}` replaced by temp-file paths.  The solver is expected to read the
//! LP file and write a solution file of `name value` lines, optionally
//! preceded by `objective <float>`, `gap <float>`, and `status <word>` lines
//! (`#` starts a comment).  Whatever the solver claims, the control is
//! re-simulated and the objective cross-checked against the evaluated
//! robustness; disagreement beyond `1e-6·max(1, |objective|)` is reported as
//! a solver failure rather than passed through.

use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use crate::fem::{simulate, ControlTrajectory};
use crate::semantics::eval_robustness;

use super::{write_lp, MilpError, MilpModel, SolveOutcome, SolveStatus};

const POLL: Duration = Duration::from_millis(25);

pub fn solve_external(
    m: &MilpModel,
    solver_cmd: &str,
    budget: Option<Duration>,
) -> Result<SolveOutcome, MilpError> {
    let dir = tempfile::Builder::new().prefix("stlpde-milp-").tempdir()?;
    let lp_path = dir.path().join("model.lp");
    let sol_path = dir.path().join("model.sol");
    std::fs::write(&lp_path, write_lp(m))?;

    let argv: Vec<String> = solver_cmd
        .split_whitespace()
        .map(|tok| {
            tok.replace("{lp}", &lp_path.to_string_lossy())
                .replace("{sol}", &sol_path.to_string_lossy())
        })
        .collect();
    let Some(program) = argv.first() else {
        return Ok(SolveOutcome::failed("empty solver command".into()));
    };

    let stdout_path = dir.path().join("solver.out");
    let stderr_path = dir.path().join("solver.err");
    let child = Command::new(program)
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(std::fs::File::create(&stdout_path)?)
        .stderr(std::fs::File::create(&stderr_path)?)
        .spawn();
    let mut child = match child {
        Ok(c) => c,
        Err(e) => {
            return Ok(SolveOutcome::failed(format!("cannot launch solver {program}: {e}")));
        }
    };

    let start = Instant::now();
    let mut timed_out = false;
    let status = loop {
        match child.try_wait()? {
            Some(status) => break Some(status),
            None => {
                if budget.is_some_and(|b| start.elapsed() >= b) {
                    let _ = child.kill();
                    let _ = child.wait();
                    timed_out = true;
                    break None;
                }
                std::thread::sleep(POLL);
            }
        }
    };

    let stderr_tail = std::fs::read_to_string(&stderr_path)
        .map(|s| {
            let s = s.trim().to_string();
            if s.len() > 4000 {
                s[s.len() - 4000..].to_string()
            } else {
                s
            }
        })
        .unwrap_or_default();

    if timed_out {
        // Best incumbent, if the solver managed to write one before the kill.
        return match std::fs::read_to_string(&sol_path) {
            Ok(text) => Ok(finish(m, &text, true).unwrap_or(SolveOutcome {
                status: SolveStatus::TimedOut,
                objective: None,
                control: None,
                trajectory: None,
                combos_evaluated: 0,
                message: Some("budget exceeded before a parseable incumbent".into()),
            })),
            Err(_) => Ok(SolveOutcome {
                status: SolveStatus::TimedOut,
                objective: None,
                control: None,
                trajectory: None,
                combos_evaluated: 0,
                message: Some("budget exceeded".into()),
            }),
        };
    }

    let status = status.expect("exit status present when not timed out");
    if !status.success() {
        return Ok(SolveOutcome::failed(format!(
            "solver exited with {status}: {stderr_tail}"
        )));
    }
    let text = match std::fs::read_to_string(&sol_path) {
        Ok(t) => t,
        Err(e) => {
            return Ok(SolveOutcome::failed(format!(
                "solver wrote no solution file ({e}); stderr: {stderr_tail}"
            )));
        }
    };
    match finish(m, &text, false) {
        Ok(outcome) => Ok(outcome),
        Err(msg) => Ok(SolveOutcome::failed(msg)),
    }
}

/// Parse a solution file, rebuild the control, re-simulate, cross-check.
fn finish(m: &MilpModel, text: &str, timed_out: bool) -> Result<SolveOutcome, String> {
    let mut reported: Option<f64> = None;
    let mut gap: Option<f64> = None;
    let mut infeasible = false;
    let mut values: Vec<(String, f64)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(key), Some(val), None) = (it.next(), it.next(), it.next()) else {
            return Err(format!("unparseable solution line: {line:?}"));
        };
        match key.to_ascii_lowercase().as_str() {
            "objective" => {
                reported = Some(val.parse().map_err(|_| format!("bad objective value {val:?}"))?)
            }
            "gap" => gap = Some(val.parse().map_err(|_| format!("bad gap value {val:?}"))?),
            "status" => {
                if val.eq_ignore_ascii_case("infeasible") {
                    infeasible = true;
                }
            }
            _ => {
                let v: f64 = val
                    .parse()
                    .map_err(|_| format!("bad value for {key}: {val:?}"))?;
                values.push((key.to_string(), v));
            }
        }
    }
    if infeasible {
        return Ok(SolveOutcome {
            status: SolveStatus::Infeasible,
            objective: None,
            control: None,
            trajectory: None,
            combos_evaluated: 0,
            message: None,
        });
    }
    if values.is_empty() {
        return Err("solution file holds no variable values".into());
    }

    let mut q = vec![0.0; m.disc.nt];
    for (name, v) in &values {
        if let Some(k) = name.strip_prefix("q_").and_then(|s| s.parse::<usize>().ok()) {
            if (1..=m.disc.nt).contains(&k) {
                q[k - 1] = *v;
            }
        }
    }
    let control = ControlTrajectory::new(q, m.system.q_max);
    let init = m
        .system
        .initial_nodes(m.disc.nx)
        .map_err(|e| format!("cannot rebuild initial profile: {e}"))?;
    let trajectory = simulate(&m.system, &m.disc, &control, &init)
        .map_err(|e| format!("solution re-simulation failed: {e}"))?;
    let r_sim = eval_robustness(&m.formula, &trajectory)
        .map_err(|e| format!("robustness evaluation failed: {e}"))?
        .value;
    if let Some(rep) = reported {
        if (rep - r_sim).abs() > 1e-6 * rep.abs().max(1.0) {
            return Err(format!(
                "solver objective {rep} disagrees with re-simulated robustness {r_sim}"
            ));
        }
    }

    let status = if timed_out {
        SolveStatus::TimedOut
    } else {
        match gap {
            Some(g) if g > 1e-9 => SolveStatus::Feasible { gap: g },
            _ => SolveStatus::Optimal,
        }
    };
    Ok(SolveOutcome {
        status,
        objective: Some(reported.unwrap_or(r_sim)),
        control: Some(control),
        trajectory: Some(trajectory),
        combos_evaluated: 0,
        message: None,
    })
}
