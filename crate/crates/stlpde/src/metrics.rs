//! Scoring predicted formulas against ground truth: IoU of satisfying
//! regions, relative utility RMSE, and validity rate.
//!
//! An atom's *satisfying region* is the set of `(x, t, u)` points with `x`
//! in the atom's section, `t` in its window, and `u` on the satisfied side
//! of the profile `a·x + b`, all clipped to the domain box
//! `[0, L] × [0, tmax] × [u_lo, u_hi]`.  The `u`-extent at each `x` is an
//! interval whose ends are clamped linear functions of `x`, so region
//! volumes and pairwise intersections integrate in closed form: split the
//! `x`-range where any profile crosses another or a `u`-bound, then sum
//! exact trapezoids.
//!
//! Two formulas are comparable when their connective trees match shape and
//! temporal operators ([`StlFormula::structure_matches`]); the score is the
//! mean volume-IoU over position-matched atom pairs.  Anything else — an
//! unparseable candidate, a domain violation, a different tree — scores 0.
//!
//! Degenerate regions (an equality atom's zero-thickness plane, a
//! zero-width window or section) drop to counting measure on the collapsed
//! axis: a pair of planes scores by the overlap area where they actually
//! coincide, and two empty regions count as identical.

use serde::{Deserialize, Serialize};

use crate::fem::PdeSystem;
use crate::stl::{parse_cspec, validate, Comparison, RegionMap, StlFormula, TemporalAtom};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("no records to score")]
    EmptyInput,
    #[error("ground truth does not fit the system: {0}")]
    DomainMismatch(String),
    #[error("ground truth record {index} is malformed: {reason}")]
    BadTruth { index: usize, reason: String },
}

/// IoU of satisfying regions, with the per-atom-pair breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IoUScore {
    /// Mean over matched atom pairs; 0 for invalid or mismatched trees.
    pub value: f64,
    /// One score per atom pair, left-to-right; empty when `value` is a
    /// structural zero.
    pub per_atom: Vec<f64>,
}

impl IoUScore {
    fn zero() -> IoUScore {
        IoUScore { value: 0.0, per_atom: Vec::new() }
    }
}

/// Score a candidate formula against the truth over the system's domain
/// box.  `None` marks a candidate that never parsed.
///
/// The truth must validate against the system; a candidate that fails
/// validation or has a different tree structure scores 0.
pub fn iou(
    truth: &StlFormula,
    cand: Option<&StlFormula>,
    sys: &PdeSystem,
) -> Result<IoUScore, MetricsError> {
    let report = validate(truth, sys);
    if !report.valid {
        return Err(MetricsError::DomainMismatch(report.issues.join("; ")));
    }
    let Some(cand) = cand else {
        return Ok(IoUScore::zero());
    };
    if !validate(cand, sys).valid || !truth.structure_matches(cand) {
        return Ok(IoUScore::zero());
    }
    let (u_lo, u_hi) = sys.state_bounds();
    let per_atom: Vec<f64> = truth
        .atoms()
        .iter()
        .zip(cand.atoms())
        .map(|(t, c)| pair_iou(t, c, sys, u_lo, u_hi))
        .collect();
    let value = per_atom.iter().sum::<f64>() / per_atom.len() as f64;
    Ok(IoUScore { value, per_atom })
}

/// `u`-interval satisfying the atom at position `x`, clipped to the state
/// box.  Returned as `(lo, hi)`; empty when `hi < lo`.
fn u_interval(atom: &TemporalAtom, x: f64, u_lo: f64, u_hi: f64) -> (f64, f64) {
    let p = atom.pred.profile_at(x);
    let (raw_lo, raw_hi) = match atom.pred.cmp {
        Comparison::Lt => (f64::NEG_INFINITY, p),
        Comparison::Gt => (p, f64::INFINITY),
        Comparison::Eq => (p, p),
    };
    (raw_lo.max(u_lo), raw_hi.min(u_hi))
}

/// One axis interval per atom, compared under a common measure: Lebesgue
/// length when either interval has width, else counting measure on the
/// shared point.
struct AxisMeasure {
    own_1: f64,
    own_2: f64,
    common: f64,
}

fn axis_measure(lo1: f64, hi1: f64, lo2: f64, hi2: f64) -> AxisMeasure {
    let w1 = hi1 - lo1;
    let w2 = hi2 - lo2;
    if w1 > 0.0 || w2 > 0.0 {
        let overlap = (hi1.min(hi2) - lo1.max(lo2)).max(0.0);
        AxisMeasure { own_1: w1, own_2: w2, common: overlap }
    } else {
        AxisMeasure { own_1: 1.0, own_2: 1.0, common: if lo1 == lo2 { 1.0 } else { 0.0 } }
    }
}

/// `x`-positions in `(lo, hi)` where the integrand may change slope: any
/// profile crossing a `u`-bound or the other profile.
fn breakpoints(a1: &TemporalAtom, a2: &TemporalAtom, lo: f64, hi: f64, u_lo: f64, u_hi: f64) -> Vec<f64> {
    let mut xs = vec![lo, hi];
    let mut push_crossing = |slope: f64, intercept: f64, level: f64| {
        if slope != 0.0 {
            let x = (level - intercept) / slope;
            if x > lo && x < hi {
                xs.push(x);
            }
        }
    };
    for atom in [a1, a2] {
        push_crossing(atom.pred.slope, atom.pred.intercept, u_lo);
        push_crossing(atom.pred.slope, atom.pred.intercept, u_hi);
    }
    push_crossing(
        a1.pred.slope - a2.pred.slope,
        a1.pred.intercept - a2.pred.intercept,
        0.0,
    );
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Exact `∫ max(0, f) dx` and `∫ 1[f ≥ 0] dx` over `[lo, hi]` for an `f`
/// that is piecewise linear between `breakpoints`.
fn integrate_piecewise(xs: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut volume = 0.0;
    let mut support = 0.0;
    for w in xs.windows(2) {
        let (c, d) = (w[0], w[1]);
        if d <= c {
            continue;
        }
        let (fc, fd) = (f(c), f(d));
        if fc >= 0.0 && fd >= 0.0 {
            volume += 0.5 * (fc + fd) * (d - c);
            support += d - c;
        } else if fc > 0.0 {
            // Sign change: the positive part is the triangle up to the root.
            let root = c + fc * (d - c) / (fc - fd);
            volume += 0.5 * fc * (root - c);
            support += root - c;
        } else if fd > 0.0 {
            let root = c + fc * (d - c) / (fc - fd);
            volume += 0.5 * fd * (d - root);
            support += d - root;
        }
    }
    (volume, support)
}

/// Volume and support-area of one atom's region (the `t`-factor excluded),
/// integrated over `[x_lo, x_hi]` under the chosen `x`-measure.
fn x_integrals(atom: &TemporalAtom, other: &TemporalAtom, point_x: bool, u_lo: f64, u_hi: f64) -> (f64, f64) {
    let f = |x: f64| {
        let (lo, hi) = u_interval(atom, x, u_lo, u_hi);
        hi - lo
    };
    if point_x {
        let len = f(atom.pred.x_lo);
        (len.max(0.0), if len >= 0.0 { 1.0 } else { 0.0 })
    } else {
        if atom.pred.x_hi <= atom.pred.x_lo {
            return (0.0, 0.0);
        }
        let xs = breakpoints(atom, other, atom.pred.x_lo, atom.pred.x_hi, u_lo, u_hi);
        integrate_piecewise(&xs, f)
    }
}

/// Volume and support-area of the pairwise intersection over the common
/// `x`-range.
fn x_intersection(a1: &TemporalAtom, a2: &TemporalAtom, point_x: bool, u_lo: f64, u_hi: f64) -> (f64, f64) {
    let f = |x: f64| {
        let (l1, h1) = u_interval(a1, x, u_lo, u_hi);
        let (l2, h2) = u_interval(a2, x, u_lo, u_hi);
        h1.min(h2) - l1.max(l2)
    };
    if point_x {
        if a1.pred.x_lo != a2.pred.x_lo {
            return (0.0, 0.0);
        }
        let len = f(a1.pred.x_lo);
        return (len.max(0.0), if len >= 0.0 { 1.0 } else { 0.0 });
    }
    let lo = a1.pred.x_lo.max(a2.pred.x_lo);
    let hi = a1.pred.x_hi.min(a2.pred.x_hi);
    if hi <= lo {
        return (0.0, 0.0);
    }
    let xs = breakpoints(a1, a2, lo, hi, u_lo, u_hi);
    integrate_piecewise(&xs, f)
}

/// Lebesgue volume of one atom's satisfying region inside the domain box.
/// Degenerate sections, windows, and equality planes all have volume 0.
pub fn region_volume(atom: &TemporalAtom, sys: &PdeSystem) -> f64 {
    let (u_lo, u_hi) = sys.state_bounds();
    let a = clip_atom(atom, sys);
    let dt = (a.t_hi - a.t_lo).max(0.0);
    dt * x_integrals(&a, &a, false, u_lo, u_hi).0
}

/// Lebesgue volume of the intersection of two atoms' satisfying regions.
pub fn intersection_volume(a1: &TemporalAtom, a2: &TemporalAtom, sys: &PdeSystem) -> f64 {
    let (u_lo, u_hi) = sys.state_bounds();
    let a1 = clip_atom(a1, sys);
    let a2 = clip_atom(a2, sys);
    let dt = (a1.t_hi.min(a2.t_hi) - a1.t_lo.max(a2.t_lo)).max(0.0);
    dt * x_intersection(&a1, &a2, false, u_lo, u_hi).0
}

fn clip_atom(atom: &TemporalAtom, sys: &PdeSystem) -> TemporalAtom {
    let mut a = *atom;
    a.t_lo = a.t_lo.clamp(0.0, sys.tmax);
    a.t_hi = a.t_hi.clamp(0.0, sys.tmax);
    a.pred.x_lo = a.pred.x_lo.clamp(0.0, sys.length);
    a.pred.x_hi = a.pred.x_hi.clamp(0.0, sys.length);
    a
}

/// IoU of two atoms' satisfying regions: volume ratio when the union has
/// volume, else area ratio of the degenerate regions, else 1 (two empty
/// regions are the same region).
fn pair_iou(a1: &TemporalAtom, a2: &TemporalAtom, sys: &PdeSystem, u_lo: f64, u_hi: f64) -> f64 {
    // Clip to the domain; validated formulas are already inside, so this
    // only guards callers that skipped validation.
    let a1 = clip_atom(a1, sys);
    let a2 = clip_atom(a2, sys);

    let t = axis_measure(a1.t_lo, a1.t_hi, a2.t_lo, a2.t_hi);
    let point_x = a1.pred.x_hi <= a1.pred.x_lo && a2.pred.x_hi <= a2.pred.x_lo;

    let (v1, s1) = x_integrals(&a1, &a2, point_x, u_lo, u_hi);
    let (v2, s2) = x_integrals(&a2, &a1, point_x, u_lo, u_hi);
    let (vi, si) = x_intersection(&a1, &a2, point_x, u_lo, u_hi);

    let vol_union = t.own_1 * v1 + t.own_2 * v2 - t.common * vi;
    if vol_union > 0.0 {
        return (t.common * vi / vol_union).clamp(0.0, 1.0);
    }
    let area_union = t.own_1 * s1 + t.own_2 * s2 - t.common * si;
    if area_union > 0.0 {
        return (t.common * si / area_union).clamp(0.0, 1.0);
    }
    1.0
}

/// Root-mean-square of per-pair relative robustness errors
/// `(r_cand − r_true) / max(|r_true|, 1e-6)`.
pub fn utility_rmse(pairs: &[(f64, f64)]) -> Result<f64, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let sum_sq: f64 = pairs
        .iter()
        .map(|&(r_true, r_cand)| {
            let rel = (r_cand - r_true) / r_true.abs().max(1e-6);
            rel * rel
        })
        .sum();
    Ok((sum_sq / pairs.len() as f64).sqrt())
}

/// Fraction of outcomes marked valid.
pub fn validity_rate(valid: &[bool]) -> Result<f64, MetricsError> {
    if valid.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(valid.iter().filter(|&&v| v).count() as f64 / valid.len() as f64)
}

/// One line of an evaluation batch: ground truth, the candidate (or an
/// invalid marker), and both robustness values where known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub system: PdeSystem,
    pub truth_regions: RegionMap,
    pub truth_cspec: String,
    #[serde(default, skip_serializing_if = "RegionMap::is_empty")]
    pub cand_regions: RegionMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cand_cspec: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub cand_invalid: bool,
    pub r_true: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_cand: Option<f64>,
}

/// Per-record scores in a batch report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordScore {
    pub index: usize,
    pub valid: bool,
    pub iou: f64,
    /// Why the candidate was scored invalid, when it was.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invalid_reason: Option<String>,
}

/// Aggregate report over an evaluation batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_records: usize,
    pub validity_rate: f64,
    pub mean_iou: f64,
    /// RMSE over records with a valid candidate and a reported robustness;
    /// absent when no record qualifies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub utility_rmse: Option<f64>,
    pub records: Vec<RecordScore>,
}

/// Score a whole batch.  Ground-truth problems must be well-formed — a
/// truth that fails to parse or validate aborts the batch — while candidate
/// defects (missing, unparseable, invalid) score 0 and are excluded from
/// the RMSE.
pub fn score_batch(records: &[EvalRecord]) -> Result<EvalReport, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut scores = Vec::with_capacity(records.len());
    let mut rmse_pairs = Vec::new();
    for (index, rec) in records.iter().enumerate() {
        let truth = parse_cspec(&rec.truth_regions, &rec.truth_cspec)
            .map_err(|e| MetricsError::BadTruth { index, reason: e.to_string() })?;

        let cand = if rec.cand_invalid {
            Err("marked invalid".to_string())
        } else {
            match &rec.cand_cspec {
                None => Err("no candidate text".to_string()),
                Some(text) => match parse_cspec(&rec.cand_regions, text) {
                    Ok(f) => {
                        let report = validate(&f, &rec.system);
                        if report.valid {
                            Ok(f)
                        } else {
                            Err(report.issues.join("; "))
                        }
                    }
                    Err(e) => Err(e.to_string()),
                },
            }
        };

        match cand {
            Ok(cand) => {
                let score = iou(&truth, Some(&cand), &rec.system)?;
                if let Some(r_cand) = rec.r_cand {
                    rmse_pairs.push((rec.r_true, r_cand));
                }
                scores.push(RecordScore {
                    index,
                    valid: true,
                    iou: score.value,
                    invalid_reason: None,
                });
            }
            Err(reason) => {
                // Truth must still be domain-valid even when the candidate
                // is not scored against it.
                iou(&truth, None, &rec.system)?;
                scores.push(RecordScore {
                    index,
                    valid: false,
                    iou: 0.0,
                    invalid_reason: Some(reason),
                });
            }
        }
    }
    let valid_flags: Vec<bool> = scores.iter().map(|s| s.valid).collect();
    let mean_iou = scores.iter().map(|s| s.iou).sum::<f64>() / scores.len() as f64;
    Ok(EvalReport {
        n_records: records.len(),
        validity_rate: validity_rate(&valid_flags)?,
        mean_iou,
        utility_rmse: match rmse_pairs.is_empty() {
            true => None,
            false => Some(utility_rmse(&rmse_pairs)?),
        },
        records: scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{MaterialSegment, PdeKind};
    use crate::stl::{LinearPredicate, TemporalOp};

    fn sys() -> PdeSystem {
        PdeSystem::uniform(
            PdeKind::Heat,
            100.0,
            5.0,
            300.0,
            MaterialSegment::heat(100.0, 4e-6, 4e8, 1.5e6),
        )
    }

    fn atom(cmp: Comparison, slope: f64, intercept: f64) -> TemporalAtom {
        TemporalAtom {
            op: TemporalOp::Globally,
            t_lo: 1.0,
            t_hi: 4.0,
            pred: LinearPredicate { x_lo: 20.0, x_hi: 80.0, cmp, slope, intercept },
        }
    }

    #[test]
    fn flat_profile_volumes_are_rectangles() {
        // u < 310 over x∈[20,80], t∈[1,4], u∈[100,500]:
        // volume = 60 · 3 · (310 − 100).
        let s = sys();
        let a = atom(Comparison::Lt, 0.0, 310.0);
        let (v, support) = x_integrals(&a, &a, false, 100.0, 500.0);
        assert!((v - 60.0 * 210.0).abs() < 1e-9);
        assert!((support - 60.0).abs() < 1e-12);
        assert_eq!(pair_iou(&a, &a, &s, 100.0, 500.0), 1.0);
    }

    #[test]
    fn sloped_profiles_clip_against_the_state_box() {
        // u < 5x, x∈[20,80], box u∈[100,500]: profile crosses u_lo at x=20
        // and u_hi at x=100 (outside), so extent = 5x−100 throughout.
        let a = atom(Comparison::Lt, 5.0, 0.0);
        let (v, _) = x_integrals(&a, &a, false, 100.0, 500.0);
        // ∫_{20}^{80} (5x − 100) dx = 2.5·(80²−20²) − 100·60 = 9000.
        assert!((v - 9000.0).abs() < 1e-9);

        // Steeper: crosses u_hi at x = 50; extent caps at 400 after that.
        let b = atom(Comparison::Lt, 10.0, 0.0);
        let (v, _) = x_integrals(&b, &b, false, 100.0, 500.0);
        // ∫_{20}^{50} (10x−100) + ∫_{50}^{80} 400 = 10500 − 3000·... hand:
        // first piece 5·(50²−20²) − 100·30 = 10500 − 3000 = 7500; second 12000.
        assert!((v - 19500.0).abs() < 1e-9);
    }

    #[test]
    fn identical_formulas_score_one() {
        let s = sys();
        let f = StlFormula::and(
            StlFormula::Atom(atom(Comparison::Lt, 0.25, 303.0)),
            StlFormula::Atom(atom(Comparison::Gt, 0.25, 297.0)),
        );
        let score = iou(&f, Some(&f), &s).unwrap();
        assert_eq!(score.value, 1.0);
        assert_eq!(score.per_atom, vec![1.0, 1.0]);
    }

    #[test]
    fn flipped_inequalities_over_one_profile_score_zero() {
        let s = sys();
        let truth = StlFormula::Atom(atom(Comparison::Lt, 0.0, 300.0));
        let cand = StlFormula::Atom(atom(Comparison::Gt, 0.0, 300.0));
        let score = iou(&truth, Some(&cand), &s).unwrap();
        assert_eq!(score.value, 0.0);
        assert_eq!(score.per_atom, vec![0.0]);
    }

    #[test]
    fn shifted_thresholds_score_the_interval_ratio() {
        // u < 310 vs u < 320 on the same box: intersection is the smaller
        // region, union the larger → (310−100)/(320−100).
        let s = sys();
        let truth = StlFormula::Atom(atom(Comparison::Lt, 0.0, 310.0));
        let cand = StlFormula::Atom(atom(Comparison::Lt, 0.0, 320.0));
        let score = iou(&truth, Some(&cand), &s).unwrap();
        assert!((score.value - 210.0 / 220.0).abs() < 1e-12);
        let swapped = iou(&cand, Some(&truth), &s).unwrap();
        assert_eq!(score.value, swapped.value);
    }

    #[test]
    fn disjoint_time_windows_score_zero() {
        let s = sys();
        let mut late = atom(Comparison::Lt, 0.0, 310.0);
        late.t_lo = 4.5;
        late.t_hi = 5.0;
        let truth = StlFormula::Atom(atom(Comparison::Lt, 0.0, 310.0));
        let cand = StlFormula::Atom(late);
        let score = iou(&truth, Some(&cand), &s).unwrap();
        // t-overlap is empty; volumes stay positive, so the ratio is 0.
        assert_eq!(score.value, 0.0);
    }

    #[test]
    fn missing_or_invalid_candidates_score_zero() {
        let s = sys();
        let truth = StlFormula::Atom(atom(Comparison::Lt, 0.0, 310.0));
        assert_eq!(iou(&truth, None, &s).unwrap().value, 0.0);

        let mut outside = atom(Comparison::Lt, 0.0, 310.0);
        outside.t_hi = 99.0;
        let cand = StlFormula::Atom(outside);
        assert_eq!(iou(&truth, Some(&cand), &s).unwrap().value, 0.0);

        let other_shape = StlFormula::and(truth.clone(), truth.clone());
        assert_eq!(iou(&truth, Some(&other_shape), &s).unwrap().value, 0.0);

        let mut eventually = atom(Comparison::Lt, 0.0, 310.0);
        eventually.op = TemporalOp::Eventually;
        let cand = StlFormula::Atom(eventually);
        assert_eq!(iou(&truth, Some(&cand), &s).unwrap().value, 0.0);
    }

    #[test]
    fn invalid_truth_is_an_error() {
        let s = sys();
        let mut outside = atom(Comparison::Lt, 0.0, 310.0);
        outside.pred.x_hi = 1000.0;
        let truth = StlFormula::Atom(outside);
        let err = iou(&truth, None, &s).unwrap_err();
        assert!(matches!(err, MetricsError::DomainMismatch(_)));
    }

    #[test]
    fn equality_atoms_score_by_plane_overlap() {
        let s = sys();
        let full = atom(Comparison::Eq, 0.25, 303.0);
        let mut half = full;
        half.t_hi = 2.5; // half the window
        let truth = StlFormula::Atom(full);
        let cand = StlFormula::Atom(half);
        let score = iou(&truth, Some(&cand), &s).unwrap();
        // Areas: 3·60 vs 1.5·60, overlap 1.5·60 → 90/180.
        assert!((score.value - 0.5).abs() < 1e-12);

        let mut shifted = full;
        shifted.pred.intercept = 304.0;
        let score = iou(&truth, Some(&StlFormula::Atom(shifted)), &s).unwrap();
        assert_eq!(score.value, 0.0, "distinct planes never coincide");

        assert_eq!(iou(&truth, Some(&truth), &s).unwrap().value, 1.0);
    }

    #[test]
    fn point_sections_compare_at_their_node() {
        let s = sys();
        let cap = |b: f64| {
            let mut a = atom(Comparison::Lt, 0.0, b);
            a.pred.x_lo = 100.0;
            a.pred.x_hi = 100.0;
            StlFormula::Atom(a)
        };
        assert_eq!(iou(&cap(345.0), Some(&cap(345.0)), &s).unwrap().value, 1.0);
        // u-extents [100,345] vs [100,335]: ratio 235/245.
        let score = iou(&cap(345.0), Some(&cap(335.0)), &s).unwrap();
        assert!((score.value - 235.0 / 245.0).abs() < 1e-12);
    }

    #[test]
    fn rmse_matches_hand_arithmetic() {
        assert!((utility_rmse(&[(1.0, 1.1)]).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(utility_rmse(&[(2.0, 2.0), (-3.0, -3.0)]).unwrap(), 0.0);
        // Tiny truth magnitudes floor at 1e-6.
        let r = utility_rmse(&[(0.0, 1e-6)]).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!(matches!(utility_rmse(&[]), Err(MetricsError::EmptyInput)));
    }

    #[test]
    fn rmse_is_invariant_under_reordering() {
        let pairs = [(1.0, 1.5), (2.0, 1.0), (-1.0, -1.2), (0.5, 0.75)];
        let mut rev = pairs;
        rev.reverse();
        assert_eq!(utility_rmse(&pairs).unwrap(), utility_rmse(&rev).unwrap());
    }

    #[test]
    fn validity_rate_counts_fractions() {
        assert_eq!(validity_rate(&[true, true]).unwrap(), 1.0);
        assert_eq!(validity_rate(&[true, false, false, false]).unwrap(), 0.25);
        assert!(matches!(validity_rate(&[]), Err(MetricsError::EmptyInput)));
    }
}
