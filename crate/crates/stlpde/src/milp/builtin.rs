//! Exact small-instance solver: enumerate binary assignments, solve one
//! condensed LP per assignment.
//!
//! The stepping is linear and time-invariant, so every state value is an
//! affine function of the controls: `u[k] = α[k] + Σ_j imp[k-j]·q_j`, with
//! `α` the uncontrolled trajectory and `imp` the response to a unit control
//! impulse.  Substituting that form eliminates the state variables entirely;
//! a combo LP has one variable per control step plus one per formula node.
//! State-box rows are kept only where interval arithmetic shows the bound is
//! reachable at all.  Under a fixed assignment the big-M rows of unselected
//! branches are slack by construction (M is at least the exact need), so
//! dropping them loses nothing and each combo LP is exact.
//!
//! The winning assignment is re-solved once in least-effort form: pin the
//! root robustness to within 1e-9 of its optimum and minimize `Σ|q|` via a
//! `q = q⁺ - q⁻` split, making the reported control canonical.

use std::time::{Duration, Instant};

use crate::fem::{simulate, ControlTrajectory, InitialProfile, Trajectory};
use crate::semantics::eval_robustness;
use crate::stl::{Comparison, TemporalAtom, TemporalOp};

use super::simplex::{solve_lp, LpProblem, LpRow, LpStatus, RowOp};
use super::{MilpError, MilpModel, NodeKind, SolveOutcome, SolveStatus};

#[derive(Debug, Clone)]
pub struct BuiltinOptions {
    /// Refuse instances whose binary-assignment product exceeds this.
    pub combo_limit: u128,
    /// Wall-clock budget; exceeded mid-enumeration returns `TimedOut` with
    /// the best incumbent so far.
    pub budget: Option<Duration>,
}

impl Default for BuiltinOptions {
    fn default() -> BuiltinOptions {
        BuiltinOptions { combo_limit: 10_000, budget: None }
    }
}

/// Affine trajectory form plus the combo-independent LP skeleton.
struct Condensed {
    nq: usize,
    n_nodes: usize,
    xs: Vec<f64>,
    init: Vec<f64>,
    /// Uncontrolled trajectory, `(nt+1) × (nx+1)`.
    alpha: Vec<Vec<f64>>,
    /// `imp[m][i]`: response of `u[·][i]` per unit control, `m` steps after
    /// the step the control produces (`m = 0` is the producing step itself).
    imp: Vec<Vec<f64>>,
    /// State-box rows that interval arithmetic could not discharge.
    box_rows: Vec<LpRow>,
}

impl Condensed {
    /// q_j (1-based step) → LP variable.
    fn q_idx(&self, j: usize) -> usize {
        j - 1
    }

    /// Node robustness variable in a combo LP.
    fn r_idx(&self, node: usize) -> usize {
        self.nq + node
    }

    fn build(m: &MilpModel) -> Result<Condensed, MilpError> {
        let nx = m.disc.nx;
        let nt = m.disc.nt;
        let q_max = m.system.q_max;
        let init = m.system.initial_nodes(nx)?;

        let zero = ControlTrajectory::new(vec![0.0; nt], q_max);
        let alpha = simulate(&m.system, &m.disc, &zero, &init)?.u;

        let mut impulse_sys = m.system.clone();
        impulse_sys.g0 = 0.0;
        impulse_sys.u0 = InitialProfile::Const(0.0);
        let amp = q_max.min(1.0);
        let mut kick = vec![0.0; nt];
        kick[0] = amp;
        let resp = simulate(
            &impulse_sys,
            &m.disc,
            &ControlTrajectory::new(kick, q_max),
            &vec![0.0; nx + 1],
        )?;
        let imp: Vec<Vec<f64>> = (1..=nt)
            .map(|k| resp.u[k].iter().map(|v| v / amp).collect())
            .collect();

        let (u_lo, u_hi) = m.system.state_bounds();
        let guard = 1e-9 * (1.0 + u_lo.abs().max(u_hi.abs()));
        let mut box_rows = Vec::new();
        for k in 0..=nt {
            for i in 0..=nx {
                let mut reach = 0.0;
                for j in 1..=k {
                    reach += imp[k - j][i].abs() * q_max;
                }
                let a = alpha[k][i];
                if a + reach > u_hi - guard {
                    let terms: Vec<(usize, f64)> =
                        (1..=k).map(|j| (j - 1, imp[k - j][i])).collect();
                    box_rows.push(LpRow { terms, op: RowOp::Le, rhs: u_hi - a });
                }
                if a - reach < u_lo + guard {
                    let terms: Vec<(usize, f64)> =
                        (1..=k).map(|j| (j - 1, -imp[k - j][i])).collect();
                    box_rows.push(LpRow { terms, op: RowOp::Le, rhs: a - u_lo });
                }
            }
        }

        Ok(Condensed {
            nq: nt,
            n_nodes: m.nodes.len(),
            xs: m.disc.xs(m.system.length),
            init,
            alpha,
            imp,
            box_rows,
        })
    }

    /// `r ≤ margin(k, i)` with the state written in affine form.
    fn margin_row(&self, rows: &mut Vec<LpRow>, r: usize, atom: &TemporalAtom, k: usize, i: usize) {
        let p = atom.pred.profile_at(self.xs[i]);
        let base = self.alpha[k][i] - p;
        let mut side = |sign: f64| {
            let mut terms = Vec::with_capacity(k + 1);
            terms.push((r, 1.0));
            for j in 1..=k {
                terms.push((self.q_idx(j), -sign * self.imp[k - j][i]));
            }
            rows.push(LpRow { terms, op: RowOp::Le, rhs: sign * base });
        };
        match atom.pred.cmp {
            Comparison::Gt => side(1.0),
            Comparison::Lt => side(-1.0),
            Comparison::Eq => {
                side(1.0);
                side(-1.0);
            }
        }
    }

    /// The LP for one binary assignment: `sel[n]` is the chosen branch of
    /// each Or node (0/1) or the chosen window offset of each F-atom.
    fn combo_lp(&self, m: &MilpModel, sel: &[usize]) -> LpProblem {
        let mut p = LpProblem::new(self.nq + self.n_nodes, true);
        for j in 0..self.nq {
            p.lower[j] = -m.system.q_max;
            p.upper[j] = m.system.q_max;
        }
        for (n, node) in m.nodes.iter().enumerate() {
            p.lower[self.r_idx(n)] = node.r_lo;
            p.upper[self.r_idx(n)] = node.r_hi;
        }
        p.objective = vec![(self.r_idx(0), 1.0)];
        p.rows = self.box_rows.clone();
        for (n, node) in m.nodes.iter().enumerate() {
            let r = self.r_idx(n);
            match &node.kind {
                NodeKind::And { left, right } => {
                    p.rows.push(LpRow {
                        terms: vec![(r, 1.0), (self.r_idx(*left), -1.0)],
                        op: RowOp::Le,
                        rhs: 0.0,
                    });
                    p.rows.push(LpRow {
                        terms: vec![(r, 1.0), (self.r_idx(*right), -1.0)],
                        op: RowOp::Le,
                        rhs: 0.0,
                    });
                }
                NodeKind::Or { left, right, .. } => {
                    let child = if sel[n] == 0 { *left } else { *right };
                    p.rows.push(LpRow {
                        terms: vec![(r, 1.0), (self.r_idx(child), -1.0)],
                        op: RowOp::Le,
                        rhs: 0.0,
                    });
                }
                NodeKind::Atom { atom, k_lo, k_hi, i_lo, i_hi, cand, .. } => {
                    if atom.op == TemporalOp::Globally {
                        for k in *k_lo..=*k_hi {
                            for i in *i_lo..=*i_hi {
                                self.margin_row(&mut p.rows, r, atom, k, i);
                            }
                        }
                    } else {
                        debug_assert!(!cand.is_empty());
                        let k = k_lo + sel[n];
                        debug_assert!(k <= *k_hi);
                        for i in *i_lo..=*i_hi {
                            self.margin_row(&mut p.rows, r, atom, k, i);
                        }
                    }
                }
            }
        }
        p
    }

    /// Least-effort re-solve of the winning combo: `q = q⁺ - q⁻`, minimize
    /// `Σ(q⁺ + q⁻)` with the root pinned to `r_star - 1e-9`.
    fn polish(&self, m: &MilpModel, sel: &[usize], r_star: f64) -> Option<Vec<f64>> {
        let combo = self.combo_lp(m, sel);
        let nq = self.nq;
        let mut p = LpProblem::new(2 * nq + self.n_nodes, false);
        for j in 0..2 * nq {
            p.lower[j] = 0.0;
            p.upper[j] = m.system.q_max;
        }
        for n in 0..self.n_nodes {
            p.lower[2 * nq + n] = combo.lower[nq + n];
            p.upper[2 * nq + n] = combo.upper[nq + n];
        }
        p.objective = (0..2 * nq).map(|j| (j, 1.0)).collect();
        let map_terms = |terms: &[(usize, f64)]| -> Vec<(usize, f64)> {
            let mut out = Vec::with_capacity(terms.len() * 2);
            for &(j, c) in terms {
                if j < nq {
                    out.push((j, c));
                    out.push((nq + j, -c));
                } else {
                    out.push((nq + j, c));
                }
            }
            out
        };
        for row in &combo.rows {
            p.rows.push(LpRow { terms: map_terms(&row.terms), op: row.op, rhs: row.rhs });
        }
        p.rows.push(LpRow {
            terms: vec![(2 * nq, 1.0)],
            op: RowOp::Ge,
            rhs: r_star - 1e-9,
        });
        match solve_lp(&p) {
            Ok(sol) if sol.status == LpStatus::Optimal => {
                Some((0..nq).map(|j| sol.x[j] - sol.x[nq + j]).collect())
            }
            _ => None,
        }
    }
}

/// Choice nodes in preorder with their selectable count.
fn choices(m: &MilpModel) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (n, node) in m.nodes.iter().enumerate() {
        match &node.kind {
            NodeKind::Or { .. } => out.push((n, 2)),
            NodeKind::Atom { cand, .. } if !cand.is_empty() => out.push((n, cand.len())),
            _ => {}
        }
    }
    out
}

pub fn solve_builtin(m: &MilpModel, opts: &BuiltinOptions) -> Result<SolveOutcome, MilpError> {
    let start = Instant::now();
    let total = m.combo_count();
    if total > opts.combo_limit {
        return Err(MilpError::ComboLimitExceeded { combos: total, limit: opts.combo_limit });
    }
    let total = total as u64;
    let cond = Condensed::build(m)?;
    let choice_nodes = choices(m);

    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    let mut combos_evaluated = 0u64;
    let mut timed_out = false;
    for combo in 0..total {
        if let Some(budget) = opts.budget {
            if start.elapsed() >= budget {
                timed_out = true;
                break;
            }
        }
        // Mixed-radix digits of `combo`; the last choice node varies fastest.
        let mut sel = vec![0usize; m.nodes.len()];
        let mut rest = combo;
        for &(n, count) in choice_nodes.iter().rev() {
            sel[n] = (rest % count as u64) as usize;
            rest /= count as u64;
        }
        let lp = cond.combo_lp(m, &sel);
        combos_evaluated += 1;
        let sol = solve_lp(&lp)?;
        match sol.status {
            LpStatus::Optimal => {
                if best.as_ref().map_or(true, |(obj, _, _)| sol.objective > *obj) {
                    let q = sol.x[..cond.nq].to_vec();
                    best = Some((sol.objective, sel, q));
                }
            }
            LpStatus::Infeasible => {}
            LpStatus::Unbounded => {
                return Err(MilpError::LpNumericalFailure(
                    "combo LP unbounded despite finite variable bounds".into(),
                ))
            }
        }
    }

    let Some((r_star, sel, raw_q)) = best else {
        return Ok(SolveOutcome {
            status: if timed_out { SolveStatus::TimedOut } else { SolveStatus::Infeasible },
            objective: None,
            control: None,
            trajectory: None,
            combos_evaluated,
            message: None,
        });
    };

    let q = cond.polish(m, &sel, r_star).unwrap_or(raw_q);
    let control = ControlTrajectory::new(q, m.system.q_max);
    let trajectory = simulate(&m.system, &m.disc, &control, &cond.init)?;
    check_claim(r_star, &m.formula, &trajectory)?;

    Ok(SolveOutcome {
        status: if timed_out { SolveStatus::TimedOut } else { SolveStatus::Optimal },
        objective: Some(r_star),
        control: Some(control),
        trajectory: Some(trajectory),
        combos_evaluated,
        message: None,
    })
}

/// Refuse to return an objective that the re-simulated trajectory disproves.
fn check_claim(
    claimed: f64,
    formula: &crate::stl::StlFormula,
    trajectory: &Trajectory,
) -> Result<(), MilpError> {
    let r_sim = eval_robustness(formula, trajectory)?.value;
    if (claimed - r_sim).abs() > 1e-6 * claimed.abs().max(1.0) {
        return Err(MilpError::LpNumericalFailure(format!(
            "LP optimum {claimed} disagrees with re-simulated robustness {r_sim}"
        )));
    }
    Ok(())
}
