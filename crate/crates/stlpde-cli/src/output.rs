//! Shared readers and writers for the CLI's file formats.  All floating
//! output goes through the library's `%.9g` formatter so reruns and
//! re-parses are byte-stable.

use std::path::Path;

use serde::Serialize;
use stlpde::fem::{ControlTrajectory, Trajectory};
use stlpde::fmt::fmt_g;

use crate::CliError;

pub fn g9(v: f64) -> String {
    fmt_g(v, 9)
}

pub fn write_out(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    write_out(path, &text)
}

pub fn jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("line serializes"));
        out.push('\n');
    }
    out
}

/// Rows `(t, x, u)` over the whole space-time grid, outer loop over time.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,x,u\n");
    for (k, t) in traj.ts.iter().enumerate() {
        for (i, x) in traj.xs.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", g9(*t), g9(*x), g9(traj.u[k][i])));
        }
    }
    out
}

/// Rows `(t, q)`: the input applied over the step starting at `t`.
pub fn control_csv(ts: &[f64], ctrl: &ControlTrajectory) -> String {
    let mut out = String::from("t,q\n");
    for (k, q) in ctrl.values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", g9(ts[k]), g9(*q)));
    }
    out
}

/// Parse a control history in the [`control_csv`] layout: a `t,q` header,
/// then one row per time step.  Only the `q` column is consumed.
pub fn read_control_csv(path: &Path, nt: usize, q_max: f64) -> Result<ControlTrajectory, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read control {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "t,q" => {}
        _ => {
            return Err(CliError::input(format!(
                "{}: expected a control CSV starting with a t,q header",
                path.display()
            )))
        }
    }
    let mut values = Vec::new();
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 2 {
            return Err(CliError::input(format!(
                "{}:{}: expected two columns t,q",
                path.display(),
                ln + 1
            )));
        }
        let q: f64 = cols[1].trim().parse().map_err(|e| {
            CliError::input(format!("{}:{}: bad q value: {e}", path.display(), ln + 1))
        })?;
        values.push(q);
    }
    if values.len() != nt {
        return Err(CliError::input(format!(
            "{}: control has {} rows, grid has {} steps",
            path.display(),
            values.len(),
            nt
        )));
    }
    Ok(ControlTrajectory::new(values, q_max))
}
