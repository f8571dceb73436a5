//! Open-loop boundary control of 1D heat and wave equations under Signal
//! Temporal Logic (STL) constraints.
//!
//! The crate is organised as a pipeline:
//!
//! * [`stl`] — the constraint language: temporal atoms over linear spatial
//!   profiles, two textual surface syntaxes, validation.
//! * [`fem`] — linear-hat finite elements for the two PDEs plus implicit
//!   Euler time stepping.
//! * [`semantics`] — quantitative robustness of a formula over a simulated
//!   trajectory.
//! * [`milp`] — "maximize robustness subject to the discretized dynamics" as
//!   a mixed-integer linear program, with a built-in exact solver and an
//!   adapter for external LP-file solvers.
//! * [`reasoning`] — subgoal chaining (solve an easier formula first, reuse
//!   its terminal state), the random-sampling baseline, and preference pairs.
//! * [`datagen`] — syntax-format enumeration, hyperparameter sampling, and
//!   natural-language rendering for dataset synthesis.
//! * [`metrics`] — IoU of satisfying regions, relative utility RMSE,
//!   validity rate.
//! * [`problem`] — the JSON problem-file schema tying a system, a grid, and
//!   a formula together.

pub mod datagen;
pub mod fem;
pub mod fmt;
pub mod metrics;
pub mod milp;
pub mod problem;
pub mod reasoning;
pub mod semantics;
pub mod stl;

pub use datagen::{
    emit_dataset, enumerate_formats, render_nl, sample_instance, DatasetRecord, ProblemInstance,
    Split, Structure, SyntaxFormat,
};
pub use fem::{ControlTrajectory, Discretization, MaterialSegment, PdeKind, PdeSystem, Trajectory};
pub use metrics::{
    intersection_volume, iou, region_volume, score_batch, utility_rmse, validity_rate, EvalRecord,
    EvalReport, IoUScore,
};
pub use milp::{
    encode, solve_builtin, solve_external, solve_model, MilpModel, SolveOutcome, SolveStatus,
    SolverChoice,
};
pub use reasoning::{
    build_preference_pairs, chain, run_baseline, sample_subgoal, BaselineConfig, ChainResult,
    Difficulty, PreferencePair, ReasoningStats,
};
pub use problem::Problem;
pub use semantics::eval_robustness;
pub use stl::{Comparison, LinearPredicate, StlFormula, TemporalAtom, TemporalOp};
