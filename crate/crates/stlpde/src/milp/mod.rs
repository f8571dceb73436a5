//! "Maximize robustness subject to the discretized dynamics" as a MILP.
//!
//! [`encode`] turns a system, mesh, and formula into an explicit model:
//! state/control/robustness variables, the stepping equations as equality
//! rows, and the formula as epigraph rows.  Min-type connectives (`G`, `And`,
//! the spatial `forall`, and both sides of `=`) need no integer variables —
//! under maximization an upper-bounded epigraph is exact for them.  Max-type
//! connectives (`F`, `Or`) select a branch through big-M rows over binary
//! variables that sum to one.
//!
//! Two solvers consume the model: [`solve_builtin`] enumerates the binary
//! assignments and solves one condensed LP per assignment with the built-in
//! simplex, exact for small instances; [`solve_external`] ships an LP file to
//! any command-line solver and cross-checks the answer by re-simulation.
//! [`write_lp`]/[`parse_lp`] are the exchange format in both directions.

mod builtin;
mod encode;
mod external;
mod lp_file;
mod simplex;

pub use builtin::{solve_builtin, BuiltinOptions};
pub use encode::encode;
pub use external::solve_external;

/// Which optimizer runs a model.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverChoice {
    /// The in-process enumerating simplex.
    Builtin { combo_limit: u128 },
    /// Command template for an external solver, e.g. `"scip {lp} {sol}"`;
    /// see [`solve_external`] for the exchange contract.
    External { cmd: String },
}

impl Default for SolverChoice {
    fn default() -> SolverChoice {
        SolverChoice::Builtin { combo_limit: BuiltinOptions::default().combo_limit }
    }
}

/// Run `m` through the chosen solver under an optional wall-clock budget.
pub fn solve_model(
    m: &MilpModel,
    solver: &SolverChoice,
    budget: Option<std::time::Duration>,
) -> Result<SolveOutcome, MilpError> {
    match solver {
        SolverChoice::Builtin { combo_limit } => {
            solve_builtin(m, &BuiltinOptions { combo_limit: *combo_limit, budget })
        }
        SolverChoice::External { cmd } => solve_external(m, cmd, budget),
    }
}
pub use lp_file::{parse_lp, solve_lp_text, write_lp, LpFileSolution, ParsedLp, ParsedLpRow};
pub use simplex::{solve_lp, LpProblem, LpRow, LpSolution, LpStatus, RowOp, PIVOT_TOL};

use crate::fem::{ControlTrajectory, Discretization, FemError, PdeSystem, Trajectory};
use crate::semantics::SemanticsError;
use crate::stl::{StlFormula, TemporalAtom};

#[derive(Debug, Clone, PartialEq)]
pub struct VarDef {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub binary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpRow {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub op: RowOp,
    pub rhs: f64,
}

/// How one formula node was encoded; drives the built-in solver and lets
/// tests inspect the structure without re-deriving it.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEnc {
    pub r_var: usize,
    /// Exact interval the node's robustness can take over the state box.
    pub r_lo: f64,
    pub r_hi: f64,
    /// Big-M used by this node's selection rows (0 for And/G nodes).
    pub big_m: f64,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    And {
        left: usize,
        right: usize,
    },
    Or {
        left: usize,
        right: usize,
        z: [usize; 2],
    },
    Atom {
        atom: TemporalAtom,
        k_lo: usize,
        k_hi: usize,
        i_lo: usize,
        i_hi: usize,
        /// `F` only: candidate robustness per window step (else empty).
        cand: Vec<usize>,
        /// `F` only: selector binaries, parallel to `cand`.
        z: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub system: PdeSystem,
    pub disc: Discretization,
    pub formula: StlFormula,
    pub vars: Vec<VarDef>,
    pub rows: Vec<MilpRow>,
    /// Objective: maximize this single variable (the root's robustness).
    pub objective_var: usize,
    /// Formula nodes in preorder; node 0 is the root.
    pub nodes: Vec<NodeEnc>,
    /// `q_1..q_nt`.
    pub q_vars: Vec<usize>,
    /// `u_vars[k][i]`.
    pub u_vars: Vec<Vec<usize>>,
    /// Wave only: `v_vars[k][i]`.
    pub v_vars: Option<Vec<Vec<usize>>>,
}

impl MilpModel {
    pub fn binary_count(&self) -> usize {
        self.vars.iter().filter(|v| v.binary).count()
    }

    /// Product of per-node choice counts the built-in solver must enumerate.
    pub fn combo_count(&self) -> u128 {
        let mut product: u128 = 1;
        for node in &self.nodes {
            let choices = match &node.kind {
                NodeKind::Or { .. } => 2,
                NodeKind::Atom { cand, .. } if !cand.is_empty() => cand.len() as u128,
                _ => 1,
            };
            product = product.saturating_mul(choices);
        }
        product
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus {
    Optimal,
    Feasible { gap: f64 },
    Infeasible,
    TimedOut,
    SolverFailed,
}

impl SolveStatus {
    pub fn label(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible { .. } => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimedOut => "timed_out",
            SolveStatus::SolverFailed => "solver_failed",
        }
    }
}

/// Result of a solve, whichever backend produced it.
///
/// Whenever `objective` is present alongside a control, the objective agrees
/// with `eval_robustness` of the re-simulated trajectory to
/// `1e-6 · max(1, |objective|)`; both solvers enforce that before returning.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub control: Option<ControlTrajectory>,
    pub trajectory: Option<Trajectory>,
    /// Built-in solver: binary assignments actually solved.
    pub combos_evaluated: u64,
    /// Failure detail (captured stderr, mismatch description, …).
    pub message: Option<String>,
}

impl SolveOutcome {
    pub(crate) fn failed(message: String) -> SolveOutcome {
        SolveOutcome {
            status: SolveStatus::SolverFailed,
            objective: None,
            control: None,
            trajectory: None,
            combos_evaluated: 0,
            message: Some(message),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MilpError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Model(#[from] FemError),
    #[error("{combos} binary combinations exceed the limit of {limit}; use an external solver")]
    ComboLimitExceeded { combos: u128, limit: u128 },
    #[error("LP numerical failure: {0}")]
    LpNumericalFailure(String),
    #[error("cannot parse LP file: {0}")]
    LpParse(String),
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
}
