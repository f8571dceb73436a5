//! Two-phase control: steer through an easier early-phase formula first, then
//! re-solve the real target from wherever that left the rod.
//!
//! A *subgoal* is a structural copy of the target formula squeezed into the
//! time before the target's first window and with its profiles perturbed.
//! [`chain`] solves the subgoal, simulates its control up to the switch time
//! `t_s` (the latest subgoal window end), restarts the rod from that state,
//! and solves the target with every window shifted by `−t_s` on the remaining
//! horizon.  Whether the chained robustness beats the direct solve is the
//! success criterion; [`run_baseline`] estimates the success rate over
//! randomly sampled subgoals, which also buckets problem difficulty and
//! feeds win/lose preference pairs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fem::{Discretization, FemError, InitialProfile, PdeKind, PdeSystem};
use crate::milp::{encode, solve_model, MilpError, SolveOutcome, SolverChoice};
use crate::stl::{LinearPredicate, StlFormula, TemporalAtom};

#[derive(Debug, thiserror::Error)]
pub enum ReasoningError {
    #[error("target starts at {t_pre} s; need more than two steps of {dt} s before it")]
    NoPreWindow { t_pre: f64, dt: f64 },
    #[error("subgoal runs until {t_s} s but the target starts at {anchor_start} s")]
    ScheduleConflict { t_s: f64, anchor_start: f64 },
    #[error("subgoal solve ended {status} without a usable control")]
    SubgoalUnsolved { status: &'static str },
    #[error("target solve ended {status} without an objective")]
    AnchorUnsolved { status: &'static str },
    #[error("need both outcomes for pairs, got {winners} winners and {losers} losers")]
    NoPairs { winners: usize, losers: usize },
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error(transparent)]
    Fem(#[from] FemError),
}

/// Wall-clock budgets for the two solves in a chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budgets {
    pub solve: Duration,
    pub subgoal: Duration,
}

impl Default for Budgets {
    fn default() -> Budgets {
        Budgets { solve: Duration::from_secs(600), subgoal: Duration::from_secs(120) }
    }
}

/// One subgoal evaluated against the direct solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainResult {
    pub subgoal: StlFormula,
    /// Switch time: the latest subgoal window end.
    pub t_s: f64,
    pub r_direct: f64,
    pub r_chained: f64,
    /// Exactly `r_chained > r_direct`.
    pub success: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

/// Bucket a problem by how often random subgoals beat the direct solve;
/// high rates mean easy problems.  Cuts are per rod physics.
pub fn difficulty_for(kind: PdeKind, success_rate: f64) -> Difficulty {
    let (easy, medium) = match kind {
        PdeKind::Heat => (0.8, 0.5),
        PdeKind::Wave => (0.88, 0.55),
    };
    if success_rate >= easy {
        Difficulty::Easy
    } else if success_rate >= medium {
        Difficulty::Medium
    } else {
        Difficulty::Hard
    }
}

/// Aggregates of one [`run_baseline`] run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReasoningStats {
    /// Share of samples with `r_chained > r_direct`, over all samples.
    pub success_rate: f64,
    /// Mean `r_chained − r_direct` over the evaluated samples only.
    pub utility_gain: f64,
    pub difficulty: Difficulty,
    pub n_samples: usize,
    /// Samples whose chain could not be evaluated (unsolvable subgoal or
    /// second phase); they count as failures in `success_rate` but are left
    /// out of `utility_gain`.
    pub n_excluded: usize,
    pub r_direct: f64,
}

/// One sampled subgoal with its evaluation, or the reason it has none.
#[derive(Debug, Clone)]
pub struct Sample {
    pub subgoal: StlFormula,
    pub outcome: Result<ChainResult, String>,
}

#[derive(Debug, Clone)]
pub struct BaselineRun {
    pub stats: ReasoningStats,
    pub samples: Vec<Sample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub solver: SolverChoice,
    pub budgets: Budgets,
    /// Worker threads for the per-sample evaluations.
    pub jobs: usize,
}

impl Default for BaselineConfig {
    fn default() -> BaselineConfig {
        BaselineConfig {
            n_samples: 20,
            seed: 0,
            solver: SolverChoice::default(),
            budgets: Budgets::default(),
            jobs: 1,
        }
    }
}

/// A win/lose formula pair for the same problem: the winner's chained
/// robustness beats the direct solve, the loser's does not.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferencePair {
    pub winner: StlFormula,
    pub loser: StlFormula,
    pub r_winner: f64,
    pub r_loser: f64,
    pub r_direct: f64,
}

fn earliest_window_start(f: &StlFormula) -> f64 {
    f.atoms().iter().map(|a| a.t_lo).fold(f64::INFINITY, f64::min)
}

fn latest_window_end(f: &StlFormula) -> f64 {
    f.atoms().iter().map(|a| a.t_hi).fold(f64::NEG_INFINITY, f64::max)
}

/// Shrink the target into the time before its own first window: same tree,
/// operators, comparisons, and space ranges; fresh windows inside
/// `[0, T_pre]`; slope scaled by `U[0.5, 1.5]` and intercept shifted by
/// `U[−0.3, 0.3]` of a tenth of the state range.
pub fn sample_subgoal(
    anchor: &StlFormula,
    sys: &PdeSystem,
    disc: &Discretization,
    rng: &mut impl Rng,
) -> Result<StlFormula, ReasoningError> {
    let t_pre = earliest_window_start(anchor);
    let dt = disc.dt(sys.tmax);
    if !(t_pre > 2.0 * dt) {
        return Err(ReasoningError::NoPreWindow { t_pre, dt });
    }
    let (u_lo, u_hi) = sys.state_bounds();
    let shift_span = 0.1 * (u_hi - u_lo);
    Ok(anchor.map_atoms(&mut |a: &TemporalAtom| {
        let t1 = rng.random_range(0.0..=t_pre);
        let t2 = rng.random_range(0.0..=t_pre);
        let scale = rng.random_range(0.5..=1.5);
        let shift = rng.random_range(-0.3..=0.3) * shift_span;
        TemporalAtom {
            op: a.op,
            t_lo: t1.min(t2),
            t_hi: t1.max(t2),
            pred: LinearPredicate {
                slope: a.pred.slope * scale,
                intercept: a.pred.intercept + shift,
                ..a.pred
            },
        }
    }))
}

fn objective_of(out: &SolveOutcome) -> Result<f64, ReasoningError> {
    out.objective.ok_or(ReasoningError::AnchorUnsolved { status: out.status.label() })
}

/// Solve the target as posed, no subgoal.
pub fn solve_direct(
    sys: &PdeSystem,
    disc: &Discretization,
    anchor: &StlFormula,
    solver: &SolverChoice,
    budget: Duration,
) -> Result<SolveOutcome, ReasoningError> {
    let m = encode(sys, disc, anchor)?;
    Ok(solve_model(&m, solver, Some(budget))?)
}

/// Evaluate one subgoal: solve it, switch at `t_s`, re-solve the shifted
/// target from the reached state, and compare with the direct robustness.
pub fn chain(
    sys: &PdeSystem,
    disc: &Discretization,
    anchor: &StlFormula,
    subgoal: &StlFormula,
    solver: &SolverChoice,
    budgets: &Budgets,
) -> Result<ChainResult, ReasoningError> {
    let direct = solve_direct(sys, disc, anchor, solver, budgets.solve)?;
    chain_against(sys, disc, anchor, subgoal, solver, budgets, objective_of(&direct)?)
}

/// [`chain`] with the direct robustness already known, so a baseline run
/// solves the target once instead of once per sample.
pub fn chain_against(
    sys: &PdeSystem,
    disc: &Discretization,
    anchor: &StlFormula,
    subgoal: &StlFormula,
    solver: &SolverChoice,
    budgets: &Budgets,
    r_direct: f64,
) -> Result<ChainResult, ReasoningError> {
    let t_s = latest_window_end(subgoal);
    let anchor_start = earliest_window_start(anchor);
    let tol = 1e-9 * sys.tmax.abs().max(1.0);
    if t_s > anchor_start + tol || disc.nt < 2 || !(sys.tmax - t_s > 0.0) {
        return Err(ReasoningError::ScheduleConflict { t_s, anchor_start });
    }

    // Phase one: drive for the subgoal, then keep its control up to the grid
    // step nearest t_s (at least one step on each side of the switch).
    let m1 = encode(sys, disc, subgoal)?;
    let phase1 = solve_model(&m1, solver, Some(budgets.subgoal))?;
    let Some(traj1) = &phase1.trajectory else {
        return Err(ReasoningError::SubgoalUnsolved { status: phase1.status.label() });
    };
    let ts = disc.ts(sys.tmax);
    let k_s = crate::fem::nearest_index(&ts, t_s).clamp(1, disc.nt - 1);

    // Phase two: the reached profile becomes the initial condition on the
    // remaining horizon; target windows shift by −t_s.  The switch time is
    // not a grid point in general, so the phase-two step size differs
    // slightly from phase one's.
    let sys2 = PdeSystem {
        tmax: sys.tmax - t_s,
        u0: InitialProfile::Nodes(traj1.u[k_s].clone()),
        ..sys.clone()
    };
    let disc2 = Discretization::new(disc.nx, disc.nt - k_s);
    let anchor2 = anchor.map_atoms(&mut |a: &TemporalAtom| {
        let t_lo = (a.t_lo - t_s).max(0.0);
        TemporalAtom { t_lo, t_hi: (a.t_hi - t_s).max(t_lo), ..*a }
    });
    let m2 = encode(&sys2, &disc2, &anchor2)?;
    let phase2 = solve_model(&m2, solver, Some(budgets.solve))?;
    let Some(r_chained) = phase2.objective else {
        return Err(ReasoningError::AnchorUnsolved { status: phase2.status.label() });
    };

    Ok(ChainResult {
        subgoal: subgoal.clone(),
        t_s,
        r_direct,
        r_chained,
        success: r_chained > r_direct,
    })
}

/// Sample `n_samples` subgoals, chain each, and aggregate.  Deterministic for
/// a fixed seed regardless of `jobs`.
pub fn run_baseline(
    sys: &PdeSystem,
    disc: &Discretization,
    anchor: &StlFormula,
    cfg: &BaselineConfig,
) -> Result<BaselineRun, ReasoningError> {
    assert!(cfg.n_samples >= 1, "need at least one sample");
    let direct = solve_direct(sys, disc, anchor, &cfg.solver, cfg.budgets.solve)?;
    let r_direct = objective_of(&direct)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let subgoals: Result<Vec<StlFormula>, ReasoningError> =
        (0..cfg.n_samples).map(|_| sample_subgoal(anchor, sys, disc, &mut rng)).collect();
    let subgoals = subgoals?;

    let slots: Mutex<Vec<Option<Result<ChainResult, String>>>> =
        Mutex::new(vec![None; cfg.n_samples]);
    let next = AtomicUsize::new(0);
    let workers = cfg.jobs.max(1).min(cfg.n_samples);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= subgoals.len() {
                    break;
                }
                let outcome =
                    chain_against(sys, disc, anchor, &subgoals[i], &cfg.solver, &cfg.budgets, r_direct)
                        .map_err(|e| e.to_string());
                slots.lock().unwrap()[i] = Some(outcome);
            });
        }
    });

    let samples: Vec<Sample> = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .zip(subgoals)
        .map(|(outcome, subgoal)| Sample { subgoal, outcome: outcome.expect("evaluated") })
        .collect();

    let mut successes = 0usize;
    let mut gains = Vec::new();
    let mut excluded = 0usize;
    for s in &samples {
        match &s.outcome {
            Ok(r) => {
                successes += r.success as usize;
                gains.push(r.r_chained - r.r_direct);
            }
            Err(_) => excluded += 1,
        }
    }
    let utility_gain = if gains.is_empty() {
        0.0
    } else {
        gains.iter().sum::<f64>() / gains.len() as f64
    };
    let success_rate = successes as f64 / cfg.n_samples as f64;
    Ok(BaselineRun {
        stats: ReasoningStats {
            success_rate,
            utility_gain,
            difficulty: difficulty_for(sys.kind, success_rate),
            n_samples: cfg.n_samples,
            n_excluded: excluded,
            r_direct,
        },
        samples,
    })
}

/// Pair every winning sample with every losing one, in sample order, up to
/// `cap` pairs.
pub fn build_preference_pairs(
    samples: &[Sample],
    cap: usize,
) -> Result<Vec<PreferencePair>, ReasoningError> {
    let evaluated: Vec<&ChainResult> =
        samples.iter().filter_map(|s| s.outcome.as_ref().ok()).collect();
    let winners: Vec<&ChainResult> = evaluated.iter().copied().filter(|r| r.success).collect();
    let losers: Vec<&ChainResult> = evaluated.iter().copied().filter(|r| !r.success).collect();
    if winners.is_empty() || losers.is_empty() {
        return Err(ReasoningError::NoPairs { winners: winners.len(), losers: losers.len() });
    }
    let mut pairs = Vec::new();
    'outer: for w in &winners {
        for l in &losers {
            if pairs.len() >= cap {
                break 'outer;
            }
            pairs.push(PreferencePair {
                winner: w.subgoal.clone(),
                loser: l.subgoal.clone(),
                r_winner: w.r_chained,
                r_loser: l.r_chained,
                r_direct: w.r_direct,
            });
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::MaterialSegment;
    use crate::stl::{Comparison, TemporalOp};

    fn rod() -> PdeSystem {
        let mut sys = PdeSystem::uniform(
            PdeKind::Heat,
            100.0,
            5.0,
            300.0,
            MaterialSegment::heat(100.0, 4e-6, 4e8, 1.5e6),
        );
        sys.q_max = 2e5;
        sys
    }

    fn late_atom(t_lo: f64, t_hi: f64, cmp: Comparison, b: f64) -> StlFormula {
        StlFormula::Atom(TemporalAtom {
            op: TemporalOp::Globally,
            t_lo,
            t_hi,
            pred: LinearPredicate { x_lo: 50.0, x_hi: 100.0, cmp, slope: 0.0, intercept: b },
        })
    }

    #[test]
    fn sampled_subgoals_fit_before_the_target_and_stay_valid() {
        let sys = rod();
        let disc = Discretization::new(4, 10);
        let anchor = StlFormula::and(
            late_atom(3.0, 5.0, Comparison::Gt, 305.0),
            late_atom(3.5, 5.0, Comparison::Lt, 400.0),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let sub = sample_subgoal(&anchor, &sys, &disc, &mut rng).unwrap();
            assert!(crate::stl::validate(&sub, &sys).valid);
            assert!(latest_window_end(&sub) <= 3.0 + 1e-12);
            assert_eq!(sub.atom_count(), 2);
            let anchor_atoms = anchor.atoms();
            for (a, s) in anchor_atoms.iter().zip(sub.atoms()) {
                assert_eq!(a.op, s.op);
                assert_eq!(a.pred.cmp, s.pred.cmp);
                assert_eq!((a.pred.x_lo, a.pred.x_hi), (s.pred.x_lo, s.pred.x_hi));
            }
        }
    }

    #[test]
    fn targets_starting_immediately_leave_no_room() {
        let sys = rod();
        let disc = Discretization::new(4, 10);
        let anchor = late_atom(0.5, 5.0, Comparison::Lt, 400.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        match sample_subgoal(&anchor, &sys, &disc, &mut rng) {
            Err(ReasoningError::NoPreWindow { t_pre, .. }) => assert_eq!(t_pre, 0.5),
            other => panic!("expected NoPreWindow, got {other:?}"),
        }
    }

    #[test]
    fn subgoals_running_past_the_target_start_conflict() {
        let sys = rod();
        let disc = Discretization::new(4, 10);
        let anchor = late_atom(3.0, 5.0, Comparison::Lt, 400.0);
        let subgoal = late_atom(0.0, 3.5, Comparison::Lt, 400.0);
        let err = chain(&sys, &disc, &anchor, &subgoal, &SolverChoice::default(), &Budgets::default())
            .unwrap_err();
        match err {
            ReasoningError::ScheduleConflict { t_s, anchor_start } => {
                assert_eq!((t_s, anchor_start), (3.5, 3.0));
            }
            other => panic!("expected ScheduleConflict, got {other:?}"),
        }
    }

    #[test]
    fn difficulty_cuts_depend_on_the_rod_physics() {
        assert_eq!(difficulty_for(PdeKind::Heat, 0.9), Difficulty::Easy);
        assert_eq!(difficulty_for(PdeKind::Heat, 0.8), Difficulty::Easy);
        assert_eq!(difficulty_for(PdeKind::Heat, 0.6), Difficulty::Medium);
        assert_eq!(difficulty_for(PdeKind::Heat, 0.5), Difficulty::Medium);
        assert_eq!(difficulty_for(PdeKind::Heat, 0.3), Difficulty::Hard);
        assert_eq!(difficulty_for(PdeKind::Wave, 0.88), Difficulty::Easy);
        assert_eq!(difficulty_for(PdeKind::Wave, 0.6), Difficulty::Medium);
        assert_eq!(difficulty_for(PdeKind::Wave, 0.55), Difficulty::Medium);
        assert_eq!(difficulty_for(PdeKind::Wave, 0.54), Difficulty::Hard);
    }

    #[test]
    fn pair_building_is_cartesian_and_capped() {
        let base = ChainResult {
            subgoal: late_atom(0.0, 1.0, Comparison::Lt, 310.0),
            t_s: 1.0,
            r_direct: 1.0,
            r_chained: 2.0,
            success: true,
        };
        let win = |r| Sample {
            subgoal: base.subgoal.clone(),
            outcome: Ok(ChainResult { r_chained: r, success: true, ..base.clone() }),
        };
        let lose = |r| Sample {
            subgoal: base.subgoal.clone(),
            outcome: Ok(ChainResult { r_chained: r, success: false, ..base.clone() }),
        };
        let samples =
            vec![win(2.0), lose(0.5), win(3.0), lose(0.2), lose(-1.0), Sample {
                subgoal: base.subgoal.clone(),
                outcome: Err("solver gave up".into()),
            }];
        let pairs = build_preference_pairs(&samples, 10).unwrap();
        assert_eq!(pairs.len(), 6);
        for p in &pairs {
            assert!(p.r_winner > p.r_direct);
            assert!(p.r_loser <= p.r_direct);
        }
        assert_eq!(build_preference_pairs(&samples, 4).unwrap().len(), 4);

        let one_sided = vec![lose(0.5), lose(0.1)];
        match build_preference_pairs(&one_sided, 10) {
            Err(ReasoningError::NoPairs { winners: 0, losers: 2 }) => {}
            other => panic!("expected NoPairs, got {other:?}"),
        }
    }
}
