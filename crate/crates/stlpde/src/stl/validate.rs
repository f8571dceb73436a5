//! Domain validation: every atom's window must fit the horizon `[0, tmax]`
//! and its spatial range the rod `[0, L]`.  Produces a report rather than an
//! error so callers can score invalid formulas (they count as zero overlap
//! in the structure metrics).

use serde::{Deserialize, Serialize};

use super::StlFormula;
use crate::fem::PdeSystem;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub issues: Vec<String>,
}

/// Check every atom of `f` against the rod and horizon of `sys`.
pub fn validate(f: &StlFormula, sys: &PdeSystem) -> ValidityReport {
    let mut issues = Vec::new();
    for (i, atom) in f.atoms().iter().enumerate() {
        if !(atom.t_lo <= atom.t_hi) {
            issues.push(format!("atom {i}: time window inverted"));
        } else if atom.t_lo < 0.0 || atom.t_hi > sys.tmax {
            issues.push(format!("atom {i}: time window outside horizon"));
        }
        let pred = &atom.pred;
        if !(pred.x_lo <= pred.x_hi) {
            issues.push(format!("atom {i}: space range inverted"));
        } else if pred.x_lo < 0.0 || pred.x_hi > sys.length {
            issues.push(format!("atom {i}: space range outside rod"));
        }
        if !atom.t_lo.is_finite()
            || !atom.t_hi.is_finite()
            || !pred.x_lo.is_finite()
            || !pred.x_hi.is_finite()
            || !pred.slope.is_finite()
            || !pred.intercept.is_finite()
        {
            issues.push(format!("atom {i}: non-finite number"));
        }
    }
    ValidityReport { valid: issues.is_empty(), issues }
}
