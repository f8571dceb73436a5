//! Quantitative robustness of a formula over a discretized trajectory.
//!
//! The value is the usual min/max composition: `min` for conjunction and for
//! `G` over its window, `max` for disjunction and `F`, and the spatial
//! `forall` is a `min` over the nodes inside the atom's range.  A positive
//! value means the formula holds with that much margin in state units.
//!
//! Grid inclusion rules:
//!
//! * a time step `k` belongs to `[t1, t2]` iff `ts[k] ∈ [t1 − Δt/2, t2 + Δt/2]`
//!   (with a small relative tolerance), so point windows like `[0.04, 0.04]`
//!   land on their nearest step instead of vanishing on coarse grids;
//! * if no step qualifies but the window overlaps the grid's reach, the step
//!   nearest the window midpoint is forced in; a window entirely beyond the
//!   grid is an [`SemanticsError::EmptyWindow`];
//! * a node `i` belongs to `[x1, x2]` iff `x1 ≤ xs[i] ≤ x2`; a range that
//!   straddles no node (including the degenerate `x1 = x2`) maps to the node
//!   nearest its midpoint.

use crate::fem::Trajectory;
use crate::stl::{Comparison, LinearPredicate, StlFormula, TemporalOp};

/// Robustness value in state units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robustness {
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemanticsError {
    #[error("window [{t_lo}, {t_hi}] lies outside the trajectory's time grid")]
    EmptyWindow { t_lo: f64, t_hi: f64 },
    #[error("formula does not fit the trajectory domain: {}", issues.join("; "))]
    DomainMismatch { issues: Vec<String> },
}

/// Signed margin of a single predicate at one grid point.
pub fn margin(pred: &LinearPredicate, x: f64, u_val: f64) -> f64 {
    let profile = pred.profile_at(x);
    match pred.cmp {
        Comparison::Gt => u_val - profile,
        Comparison::Lt => profile - u_val,
        Comparison::Eq => -(u_val - profile).abs(),
    }
}

/// Time steps of `ts` covered by `[t_lo, t_hi]` after snapping, as an
/// inclusive index range.
pub fn window_steps(ts: &[f64], t_lo: f64, t_hi: f64) -> Result<(usize, usize), SemanticsError> {
    let dt = if ts.len() < 2 {
        0.0
    } else {
        (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64
    };
    let tol = 1e-9 * t_hi.abs().max(ts[ts.len() - 1].abs()).max(1.0);
    let lo_edge = t_lo - 0.5 * dt - tol;
    let hi_edge = t_hi + 0.5 * dt + tol;

    let mut first = None;
    let mut last = 0;
    for (k, &t) in ts.iter().enumerate() {
        if t >= lo_edge && t <= hi_edge {
            if first.is_none() {
                first = Some(k);
            }
            last = k;
        }
    }
    if let Some(first) = first {
        return Ok((first, last));
    }
    // Nothing qualified: the window sits either between the grid's reach and
    // then a nearest step exists, or wholly beyond it.
    if t_hi < ts[0] - 0.5 * dt - tol || t_lo > ts[ts.len() - 1] + 0.5 * dt + tol {
        return Err(SemanticsError::EmptyWindow { t_lo, t_hi });
    }
    let mid = 0.5 * (t_lo + t_hi);
    let k = crate::fem::nearest_index(ts, mid);
    Ok((k, k))
}

/// Nodes of `xs` covered by `[x_lo, x_hi]`, as an inclusive index range.
pub fn spatial_nodes(xs: &[f64], x_lo: f64, x_hi: f64) -> (usize, usize) {
    let tol = 1e-9 * x_hi.abs().max(xs[xs.len() - 1].abs()).max(1.0);
    let mut first = None;
    let mut last = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x >= x_lo - tol && x <= x_hi + tol {
            if first.is_none() {
                first = Some(i);
            }
            last = i;
        }
    }
    match first {
        Some(first) => (first, last),
        None => {
            let mid = 0.5 * (x_lo + x_hi);
            let i = crate::fem::nearest_index(xs, mid);
            (i, i)
        }
    }
}

/// Evaluate the robustness of `f` over `traj`.
pub fn eval_robustness(f: &StlFormula, traj: &Trajectory) -> Result<Robustness, SemanticsError> {
    check_domain(f, traj)?;
    let value = eval_node(f, traj)?;
    Ok(Robustness { value })
}

fn check_domain(f: &StlFormula, traj: &Trajectory) -> Result<(), SemanticsError> {
    let tmax = traj.ts[traj.ts.len() - 1];
    let length = traj.xs[traj.xs.len() - 1];
    let t_tol = 1e-9 * tmax.max(1.0);
    let x_tol = 1e-9 * length.max(1.0);
    let mut issues = Vec::new();
    for (i, atom) in f.atoms().iter().enumerate() {
        if !(atom.t_lo <= atom.t_hi) {
            issues.push(format!("atom {i}: time window inverted"));
        } else if atom.t_lo < -t_tol || atom.t_hi > tmax + t_tol {
            issues.push(format!("atom {i}: time window outside horizon"));
        }
        let pred = &atom.pred;
        if !(pred.x_lo <= pred.x_hi) {
            issues.push(format!("atom {i}: space range inverted"));
        } else if pred.x_lo < -x_tol || pred.x_hi > length + x_tol {
            issues.push(format!("atom {i}: space range outside rod"));
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(SemanticsError::DomainMismatch { issues })
    }
}

fn eval_node(f: &StlFormula, traj: &Trajectory) -> Result<f64, SemanticsError> {
    match f {
        StlFormula::Atom(atom) => {
            let (k_lo, k_hi) = window_steps(&traj.ts, atom.t_lo, atom.t_hi)?;
            let (i_lo, i_hi) = spatial_nodes(&traj.xs, atom.pred.x_lo, atom.pred.x_hi);
            let mut acc = match atom.op {
                TemporalOp::Globally => f64::INFINITY,
                TemporalOp::Eventually => f64::NEG_INFINITY,
            };
            for k in k_lo..=k_hi {
                let mut step_min = f64::INFINITY;
                for i in i_lo..=i_hi {
                    let m = margin(&atom.pred, traj.xs[i], traj.u[k][i]);
                    step_min = step_min.min(m);
                }
                acc = match atom.op {
                    TemporalOp::Globally => acc.min(step_min),
                    TemporalOp::Eventually => acc.max(step_min),
                };
            }
            Ok(acc)
        }
        StlFormula::And(l, r) => Ok(eval_node(l, traj)?.min(eval_node(r, traj)?)),
        StlFormula::Or(l, r) => Ok(eval_node(l, traj)?.max(eval_node(r, traj)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stl::parse_mathform;

    fn constant_traj(nx: usize, nt: usize, length: f64, tmax: f64, value: f64) -> Trajectory {
        let disc = crate::fem::Discretization::new(nx, nt);
        Trajectory {
            xs: disc.xs(length),
            ts: disc.ts(tmax),
            u: vec![vec![value; nx + 1]; nt + 1],
        }
    }

    #[test]
    fn margins_follow_the_three_comparison_rules() {
        let gt = LinearPredicate {
            x_lo: 0.0,
            x_hi: 100.0,
            cmp: Comparison::Gt,
            slope: 0.0,
            intercept: 290.0,
        };
        assert_eq!(margin(&gt, 50.0, 300.0), 10.0);

        let lt = LinearPredicate { cmp: Comparison::Lt, intercept: 345.0, ..gt };
        assert_eq!(margin(&lt, 100.0, 340.0), 5.0);

        let eq = LinearPredicate { cmp: Comparison::Eq, intercept: 300.0, ..gt };
        assert_eq!(margin(&eq, 0.0, 300.0), 0.0);
        assert_eq!(margin(&eq, 0.0, 304.0), -4.0);
        assert_eq!(margin(&eq, 0.0, 296.0), -4.0);
    }

    #[test]
    fn constant_state_scores_its_margin() {
        let traj = constant_traj(10, 10, 100.0, 5.0, 300.0);
        let f = parse_mathform("G_[0, 1] (forall x in [0, 100] (u(x) - 290 > 0))").unwrap();
        assert_eq!(eval_robustness(&f, &traj).unwrap().value, 10.0);
    }

    #[test]
    fn connectives_compose_with_min_and_max() {
        let traj = constant_traj(10, 10, 100.0, 5.0, 300.0);
        let near = "G_[0, 1] (forall x in [0, 100] (u(x) - 290 > 0))";
        let far = "G_[0, 1] (forall x in [0, 100] (u(x) - 400 > 0))";
        let or = parse_mathform(&format!("({near}) v ({far})")).unwrap();
        let and = parse_mathform(&format!("({near}) ^ ({far})")).unwrap();
        assert_eq!(eval_robustness(&or, &traj).unwrap().value, 10.0);
        assert_eq!(eval_robustness(&and, &traj).unwrap().value, -100.0);
    }

    #[test]
    fn point_window_snaps_to_the_nearest_step() {
        // Grid ts = 0, 0.1, ..., 1.0; the window [0.04, 0.04] qualifies step 0
        // (|0 - 0.04| < Δt/2) and, after snapping, nothing else.
        let mut traj = constant_traj(4, 10, 100.0, 1.0, 300.0);
        for (k, row) in traj.u.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v = 300.0 + k as f64;
            }
        }
        let f = parse_mathform("G_[0.04, 0.04] (forall x in [0, 100] (u(x) - 290 > 0))")
            .unwrap();
        assert_eq!(eval_robustness(&f, &traj).unwrap().value, 10.0);

        let f = parse_mathform("G_[0.06, 0.06] (forall x in [0, 100] (u(x) - 290 > 0))")
            .unwrap();
        assert_eq!(eval_robustness(&f, &traj).unwrap().value, 11.0);
    }

    #[test]
    fn degenerate_space_range_maps_to_the_nearest_node() {
        // xs = 0, 25, 50, 75, 100.
        let mut traj = constant_traj(4, 2, 100.0, 1.0, 300.0);
        for row in traj.u.iter_mut() {
            row[4] = 340.0;
        }
        let f = parse_mathform("G_[0, 1] (forall x in [100, 100] (u(x) - 345 < 0))").unwrap();
        assert_eq!(eval_robustness(&f, &traj).unwrap().value, 5.0);
        let f = parse_mathform("G_[0, 1] (forall x in [95, 99] (u(x) - 345 < 0))").unwrap();
        assert_eq!(eval_robustness(&f, &traj).unwrap().value, 5.0);
    }

    #[test]
    fn window_beyond_the_grid_is_an_empty_window() {
        let traj = constant_traj(4, 10, 100.0, 1.0, 300.0);
        let steps = window_steps(&traj.ts, 1.2, 1.5);
        assert!(matches!(steps, Err(SemanticsError::EmptyWindow { .. })));
        // Just past the end but within Δt/2 reach still snaps.
        assert_eq!(window_steps(&traj.ts, 1.02, 1.04).unwrap(), (10, 10));
    }

    #[test]
    fn domain_mismatch_reports_like_validation() {
        let traj = constant_traj(4, 10, 100.0, 1.0, 300.0);
        let f = parse_mathform("G_[0, 2] (forall x in [0, 100] (u(x) - 290 > 0))").unwrap();
        match eval_robustness(&f, &traj) {
            Err(SemanticsError::DomainMismatch { issues }) => {
                assert_eq!(issues, vec!["atom 0: time window outside horizon"]);
            }
            other => panic!("expected DomainMismatch, got {other:?}"),
        }
    }

    #[test]
    fn globally_and_eventually_agree_on_a_single_step() {
        let mut traj = constant_traj(4, 10, 100.0, 1.0, 300.0);
        for (k, row) in traj.u.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v = 300.0 - k as f64;
            }
        }
        let g = parse_mathform("G_[0.5, 0.5] (forall x in [0, 100] (u(x) - 290 > 0))").unwrap();
        let f = parse_mathform("F_[0.5, 0.5] (forall x in [0, 100] (u(x) - 290 > 0))").unwrap();
        let rg = eval_robustness(&g, &traj).unwrap().value;
        let rf = eval_robustness(&f, &traj).unwrap().value;
        assert_eq!(rg, rf);
    }
}
