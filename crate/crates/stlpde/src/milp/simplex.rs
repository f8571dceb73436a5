//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Small and deterministic rather than fast: the instances it sees are the
//! condensed robustness LPs (tens of variables, hundreds of rows) and parsed
//! LP files of comparable size.  Bland's entering/leaving rule guarantees
//! termination on degenerate bases at the cost of extra pivots.
//!
//! Variables are shifted to their lower bounds internally (`y = x - lo`), so
//! every variable needs a finite lower bound; upper bounds may be infinite
//! and otherwise become extra rows.  Each row is scaled by its largest
//! coefficient magnitude before the tableau is built.

use super::MilpError;

/// Pivot and reduced-cost tolerance.
pub const PIVOT_TOL: f64 = 1e-9;

const ITER_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub terms: Vec<(usize, f64)>,
    pub op: RowOp,
    pub rhs: f64,
}

/// `optimize c·x + obj_const  s.t. rows, lower ≤ x ≤ upper`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub maximize: bool,
    pub objective: Vec<(usize, f64)>,
    pub obj_const: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LpRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Meaningful only when `status` is `Optimal`.
    pub objective: f64,
    pub x: Vec<f64>,
}

impl LpProblem {
    pub fn new(n: usize, maximize: bool) -> LpProblem {
        LpProblem {
            maximize,
            objective: Vec::new(),
            obj_const: 0.0,
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            rows: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.lower.len()
    }
}

/// One row after shifting, deduplication, and scaling: `coeffs·y op rhs`.
struct StdRow {
    coeffs: Vec<f64>,
    op: RowOp,
    rhs: f64,
}

pub fn solve_lp(p: &LpProblem) -> Result<LpSolution, MilpError> {
    let n = p.n();
    for (j, (&lo, &hi)) in p.lower.iter().zip(&p.upper).enumerate() {
        if !lo.is_finite() {
            return Err(MilpError::LpNumericalFailure(format!(
                "variable {j} has no finite lower bound"
            )));
        }
        if hi.is_nan() || lo > hi {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: 0.0,
                x: vec![0.0; n],
            });
        }
    }

    // Shift to y = x - lo and scale each row; constant rows are decided here.
    let mut std_rows: Vec<StdRow> = Vec::new();
    let mut dense = vec![0.0; n];
    for row in &p.rows {
        for &(j, c) in &row.terms {
            if !c.is_finite() {
                return Err(MilpError::LpNumericalFailure(
                    "non-finite row coefficient".into(),
                ));
            }
            dense[j] += c;
        }
        let mut coeffs = vec![0.0; n];
        let mut rhs = row.rhs;
        let mut scale = 0.0f64;
        for &(j, _) in &row.terms {
            if dense[j] != 0.0 {
                coeffs[j] = dense[j];
                rhs -= dense[j] * p.lower[j];
                scale = scale.max(dense[j].abs());
                dense[j] = 0.0;
            }
        }
        if scale == 0.0 {
            // 0 op rhs: either trivially true or the whole problem is infeasible.
            let violated = match row.op {
                RowOp::Le => rhs < -PIVOT_TOL,
                RowOp::Ge => rhs > PIVOT_TOL,
                RowOp::Eq => rhs.abs() > PIVOT_TOL,
            };
            if violated {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    objective: 0.0,
                    x: vec![0.0; n],
                });
            }
            continue;
        }
        for c in coeffs.iter_mut() {
            *c /= scale;
        }
        std_rows.push(StdRow { coeffs, op: row.op, rhs: rhs / scale });
    }
    for j in 0..n {
        let span = p.upper[j] - p.lower[j];
        if span.is_finite() {
            let mut coeffs = vec![0.0; n];
            coeffs[j] = 1.0;
            std_rows.push(StdRow { coeffs, op: RowOp::Le, rhs: span });
        }
    }

    Tableau::build(n, std_rows)?.run(p)
}

struct Tableau {
    n: usize,
    /// Total columns excluding the value column.
    width: usize,
    rows: Vec<Vec<f64>>,
    /// Basic variable (column index) of each row.
    basis: Vec<usize>,
    /// Artificial columns; banned from entering once phase 1 ends.
    artificial: Vec<bool>,
    /// Phase-1 cost row, `[reduced costs | -objective]`.
    cost1: Vec<f64>,
    /// Phase-2 cost row, maintained through phase-1 pivots.
    cost2: Vec<f64>,
    feas_tol: f64,
}

enum Step {
    Done,
    Unbounded,
}

impl Tableau {
    fn build(n: usize, std_rows: Vec<StdRow>) -> Result<Tableau, MilpError> {
        let m = std_rows.len();
        // One slack or surplus+artificial pair per row; sized for the worst case.
        let width = n + 2 * m;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut artificial = vec![false; width];
        let mut next_col = n;
        let mut max_rhs = 0.0f64;

        for sr in std_rows {
            let mut flip = 1.0;
            let mut op = sr.op;
            if sr.rhs < 0.0 {
                flip = -1.0;
                op = match op {
                    RowOp::Le => RowOp::Ge,
                    RowOp::Ge => RowOp::Le,
                    RowOp::Eq => RowOp::Eq,
                };
            }
            let mut row = vec![0.0; width + 1];
            for (j, c) in sr.coeffs.iter().enumerate() {
                row[j] = flip * c;
            }
            row[width] = flip * sr.rhs;
            max_rhs = max_rhs.max(row[width]);
            match op {
                RowOp::Le => {
                    row[next_col] = 1.0;
                    basis.push(next_col);
                    next_col += 1;
                }
                RowOp::Ge => {
                    row[next_col] = -1.0;
                    next_col += 1;
                    row[next_col] = 1.0;
                    artificial[next_col] = true;
                    basis.push(next_col);
                    next_col += 1;
                }
                RowOp::Eq => {
                    row[next_col] = 1.0;
                    artificial[next_col] = true;
                    basis.push(next_col);
                    next_col += 1;
                }
            }
            rows.push(row);
        }
        // Trim unused columns so pivots touch less memory.
        let used = next_col;
        for row in rows.iter_mut() {
            let rhs = row[width];
            row.truncate(used);
            row.push(rhs);
        }
        artificial.truncate(used);

        let mut cost1 = vec![0.0; used + 1];
        for (j, &a) in artificial.iter().enumerate() {
            if a {
                cost1[j] = 1.0;
            }
        }
        let cost2 = vec![0.0; used + 1];
        let mut tab = Tableau {
            n,
            width: used,
            rows,
            basis,
            artificial,
            cost1,
            cost2,
            feas_tol: 1e-7 * (1.0 + max_rhs),
        };
        for i in 0..tab.rows.len() {
            if tab.artificial[tab.basis[i]] {
                let row = tab.rows[i].clone();
                for (c, r) in tab.cost1.iter_mut().zip(&row) {
                    *c -= r;
                }
            }
        }
        Ok(tab)
    }

    fn run(mut self, p: &LpProblem) -> Result<LpSolution, MilpError> {
        let n = self.n;
        // Phase-2 costs in minimization form, priced out over the start basis
        // as pivots go (the basis starts with zero phase-2 cost everywhere).
        for &(j, c) in &p.objective {
            self.cost2[j] += if p.maximize { -c } else { c };
        }

        let mut iters = 0usize;
        match self.optimize(true, &mut iters)? {
            Step::Done => {}
            Step::Unbounded => {
                return Err(MilpError::LpNumericalFailure(
                    "phase-1 objective unbounded".into(),
                ))
            }
        }
        if -self.cost1[self.width] > self.feas_tol {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: 0.0,
                x: vec![0.0; n],
            });
        }
        self.evict_artificials();

        let status = match self.optimize(false, &mut iters)? {
            Step::Done => LpStatus::Optimal,
            Step::Unbounded => LpStatus::Unbounded,
        };
        let mut x = p.lower.clone();
        if status == LpStatus::Optimal {
            for (i, &b) in self.basis.iter().enumerate() {
                if b < n {
                    x[b] += self.rows[i][self.width];
                }
            }
        }
        let objective = p.obj_const
            + p.objective.iter().map(|&(j, c)| c * x[j]).sum::<f64>();
        Ok(LpSolution { status, objective, x })
    }

    /// Bland pivoting on the phase-1 or phase-2 cost row.
    fn optimize(&mut self, phase1: bool, iters: &mut usize) -> Result<Step, MilpError> {
        loop {
            *iters += 1;
            if *iters > ITER_LIMIT {
                return Err(MilpError::LpNumericalFailure(format!(
                    "simplex iteration limit ({ITER_LIMIT}) exceeded"
                )));
            }
            let cost = if phase1 { &self.cost1 } else { &self.cost2 };
            let entering = (0..self.width).find(|&j| {
                cost[j] < -PIVOT_TOL && (phase1 || !self.artificial[j])
            });
            let Some(col) = entering else { return Ok(Step::Done) };

            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[col];
                if a > PIVOT_TOL {
                    let ratio = row[self.width] / a;
                    let better = match leave {
                        None => true,
                        Some((bi, br)) => {
                            ratio < br - 1e-12 * (1.0 + br.abs())
                                || (ratio <= br + 1e-12 * (1.0 + br.abs())
                                    && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row_i, _)) = leave else { return Ok(Step::Unbounded) };
            self.pivot(row_i, col);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && row[c] != 0.0 {
                let f = row[c];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        for cost in [&mut self.cost1, &mut self.cost2] {
            if cost[c] != 0.0 {
                let f = cost[c];
                for (v, pv) in cost.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                cost[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Pivot basic artificials out on any usable column; drop redundant rows.
    fn evict_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.artificial[self.basis[i]] {
                let col = (0..self.width)
                    .find(|&j| !self.artificial[j] && self.rows[i][j].abs() > PIVOT_TOL);
                match col {
                    Some(c) => self.pivot(i, c),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(terms: &[(usize, f64)], op: RowOp, rhs: f64) -> LpRow {
        LpRow { terms: terms.to_vec(), op, rhs }
    }

    #[test]
    fn textbook_maximum_lands_on_the_known_vertex() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18, x,y ≥ 0 → (2, 6), 36.
        let mut p = LpProblem::new(2, true);
        p.objective = vec![(0, 3.0), (1, 5.0)];
        p.rows = vec![
            row(&[(0, 1.0)], RowOp::Le, 4.0),
            row(&[(1, 2.0)], RowOp::Le, 12.0),
            row(&[(0, 3.0), (1, 2.0)], RowOp::Le, 18.0),
        ];
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn conflicting_rows_are_infeasible() {
        let mut p = LpProblem::new(1, true);
        p.objective = vec![(0, 1.0)];
        p.rows = vec![
            row(&[(0, 1.0)], RowOp::Ge, 2.0),
            row(&[(0, 1.0)], RowOp::Le, 1.0),
        ];
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn equalities_and_shifted_bounds_combine() {
        // min 2x + y s.t. x + y = 10, x ∈ [0, 4], y ∈ [0, 10] → x=0, y=10.
        let mut p = LpProblem::new(2, false);
        p.objective = vec![(0, 2.0), (1, 1.0)];
        p.upper = vec![4.0, 10.0];
        p.rows = vec![row(&[(0, 1.0), (1, 1.0)], RowOp::Eq, 10.0)];
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 10.0).abs() < 1e-9);
        assert!(s.x[0].abs() < 1e-9);
    }

    #[test]
    fn negative_lower_bounds_shift_cleanly() {
        // max x s.t. x + y ≤ 1, y ∈ [-2, 0], x ∈ [-5, ∞) → x = 3 at y = -2.
        let mut p = LpProblem::new(2, true);
        p.objective = vec![(0, 1.0)];
        p.lower = vec![-5.0, -2.0];
        p.upper = vec![f64::INFINITY, 0.0];
        p.rows = vec![row(&[(0, 1.0), (1, 1.0)], RowOp::Le, 1.0)];
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-9, "objective {}", s.objective);
    }

    #[test]
    fn missing_upper_bound_is_reported_unbounded() {
        let mut p = LpProblem::new(1, true);
        p.objective = vec![(0, 1.0)];
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn beale_degeneracy_terminates_at_the_optimum() {
        // The classic cycling example; Bland's rule must walk out of it.
        // min -3/4·a + 150b - 1/50·c + 6d → -0.05 at c = 1, a = 1/25.
        let mut p = LpProblem::new(4, false);
        p.objective = vec![(0, -0.75), (1, 150.0), (2, -0.02), (3, 6.0)];
        p.rows = vec![
            row(&[(0, 0.25), (1, -60.0), (2, -1.0 / 25.0), (3, 9.0)], RowOp::Le, 0.0),
            row(&[(0, 0.5), (1, -90.0), (2, -1.0 / 50.0), (3, 3.0)], RowOp::Le, 0.0),
            row(&[(2, 1.0)], RowOp::Le, 1.0),
        ];
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 0.05).abs() < 1e-9, "objective {}", s.objective);
    }

    #[test]
    fn fixed_variables_are_honored() {
        let mut p = LpProblem::new(2, true);
        p.objective = vec![(0, 1.0), (1, 1.0)];
        p.lower = vec![2.0, 0.0];
        p.upper = vec![2.0, f64::INFINITY];
        p.rows = vec![row(&[(0, 1.0), (1, 1.0)], RowOp::Le, 5.0)];
        let s = solve_lp(&p).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-12);
        assert!((s.objective - 5.0).abs() < 1e-9);
    }

    #[test]
    fn duplicate_term_indices_accumulate() {
        // x + x ≤ 4 means 2x ≤ 4.
        let mut p = LpProblem::new(1, true);
        p.objective = vec![(0, 1.0)];
        p.rows = vec![row(&[(0, 1.0), (0, 1.0)], RowOp::Le, 4.0)];
        let s = solve_lp(&p).unwrap();
        assert!((s.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn empty_box_is_infeasible() {
        let mut p = LpProblem::new(1, true);
        p.objective = vec![(0, 1.0)];
        p.lower = vec![1.0];
        p.upper = vec![0.0];
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    prop_compose! {
        fn small_lp()(
            n in 1usize..5,
            maximize in any::<bool>(),
            coefs in proptest::collection::vec(-4i32..5, 1..30),
            rhss in proptest::collection::vec(-6i32..7, 1..7),
            ops in proptest::collection::vec(0u8..3, 1..7),
            obj in proptest::collection::vec(-3i32..4, 5),
        ) -> LpProblem {
            let m = rhss.len().min(ops.len());
            let mut p = LpProblem::new(n, maximize);
            p.lower = vec![-3.0; n];
            p.upper = vec![3.0; n];
            p.objective = (0..n).map(|j| (j, obj[j] as f64)).collect();
            for r in 0..m {
                let terms: Vec<(usize, f64)> = (0..n)
                    .map(|j| (j, coefs[(r * n + j) % coefs.len()] as f64))
                    .collect();
                let op = match ops[r] { 0 => RowOp::Le, 1 => RowOp::Ge, _ => RowOp::Eq };
                p.rows.push(LpRow { terms, op, rhs: rhss[r] as f64 });
            }
            p
        }
    }

    fn violation(p: &LpProblem, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(p.lower[j] - v).max(v - p.upper[j]);
        }
        for r in &p.rows {
            let lhs: f64 = r.terms.iter().map(|&(j, c)| c * x[j]).sum();
            let gap = match r.op {
                RowOp::Le => lhs - r.rhs,
                RowOp::Ge => r.rhs - lhs,
                RowOp::Eq => (lhs - r.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn random_lps_dominate_sampled_feasible_points(p in small_lp(), seeds in proptest::collection::vec(0u64..1u64 << 48, 60)) {
            let sol = solve_lp(&p).unwrap();
            // Low-discrepancy-ish deterministic samples of the box.
            let n = p.n();
            for (s, seed) in seeds.iter().enumerate() {
                let x: Vec<f64> = (0..n)
                    .map(|j| {
                        let h = seed.wrapping_mul(0x9e3779b97f4a7c15).rotate_left((j * 7 + s) as u32 % 63);
                        let t = (h % 10_000) as f64 / 9_999.0;
                        p.lower[j] + t * (p.upper[j] - p.lower[j])
                    })
                    .collect();
                if violation(&p, &x) <= 1e-9 {
                    prop_assert!(sol.status != LpStatus::Infeasible,
                        "reported infeasible but {x:?} is feasible");
                    if sol.status == LpStatus::Optimal {
                        let val: f64 = p.obj_const
                            + p.objective.iter().map(|&(j, c)| c * x[j]).sum::<f64>();
                        if p.maximize {
                            prop_assert!(sol.objective >= val - 1e-6);
                        } else {
                            prop_assert!(sol.objective <= val + 1e-6);
                        }
                    }
                }
            }
            if sol.status == LpStatus::Optimal {
                prop_assert!(violation(&p, &sol.x) <= 1e-6, "optimal point violates by {}", violation(&p, &sol.x));
            }
        }
    }
}
