//! The constraint language: temporal atoms over linear spatial profiles,
//! composed with binary conjunction and disjunction.
//!
//! An atom constrains the state field `u` against a linear profile
//! `a·x + b` over a space range `[x_lo, x_hi]` and a time window
//! `[t_lo, t_hi]`, either for all times in the window (`G`) or for at least
//! one (`F`).  The spatial quantifier is always "for all x in range".
//!
//! Two textual syntaxes exist for the same AST:
//!
//! * the *cspec* form ([`cspec`]): region labels plus a connective skeleton,
//!   e.g. `(((G_[0.049, 0.053] (A)) & (F_[0.051, 0.149] (B))) | (F_[0.061, 0.169] (C)))`;
//! * the *math-notation* form ([`mathform`]), e.g.
//!   `G_[4, 5] (forall x in [30, 60] (u(x) - (0.25 * x + 303) < 0))`.
//!
//! Parsing either yields the same tree; printing normalizes whitespace and
//! number formatting (see [`crate::fmt`]).

mod cspec;
mod linexpr;
mod mathform;
mod validate;

pub use cspec::{parse_cspec, print_cspec, RegionMap};
pub use mathform::{parse_mathform, print_mathform};
pub use validate::{validate, ValidityReport};

use serde::{Deserialize, Serialize};

/// Comparison direction of a spatial predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "=")]
    Eq,
}

impl Comparison {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Lt => "<",
            Comparison::Gt => ">",
            Comparison::Eq => "=",
        }
    }
}

/// `u(x) cmp a·x + b` for all `x` in `[x_lo, x_hi]`.
///
/// Serializes to the region-predicate JSON object
/// `{"x_lo":…, "x_hi":…, "cmp":"<", "a":…, "b":…}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearPredicate {
    pub x_lo: f64,
    pub x_hi: f64,
    pub cmp: Comparison,
    #[serde(rename = "a")]
    pub slope: f64,
    #[serde(rename = "b")]
    pub intercept: f64,
}

impl LinearPredicate {
    /// Profile value `a·x + b`.
    pub fn profile_at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// Parse the textual region form used alongside cspec strings, e.g.
    /// `[9829, 19907], "<", 1.882e-05 * x + 0.187` (quotes optional).
    pub fn parse_text(text: &str) -> Result<Self, StlError> {
        cspec::parse_region_text(text)
    }
}

/// Temporal quantifier over an atom's time window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemporalOp {
    /// `G`: the predicate holds at every step in the window.
    Globally,
    /// `F`: the predicate holds at some step in the window.
    Eventually,
}

impl TemporalOp {
    pub fn letter(self) -> char {
        match self {
            TemporalOp::Globally => 'G',
            TemporalOp::Eventually => 'F',
        }
    }
}

/// One temporal operator applied to one spatial predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalAtom {
    pub op: TemporalOp,
    pub t_lo: f64,
    pub t_hi: f64,
    pub pred: LinearPredicate,
}

/// Binary formula tree.  Parenthesization is explicit: `φ1∧φ2∧φ3` is the
/// left-associated `And(And(φ1, φ2), φ3)`, distinct from `And(φ1, And(φ2, φ3))`.
#[derive(Debug, Clone, PartialEq)]
pub enum StlFormula {
    Atom(TemporalAtom),
    And(Box<StlFormula>, Box<StlFormula>),
    Or(Box<StlFormula>, Box<StlFormula>),
}

impl StlFormula {
    pub fn and(left: StlFormula, right: StlFormula) -> StlFormula {
        StlFormula::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: StlFormula, right: StlFormula) -> StlFormula {
        StlFormula::Or(Box::new(left), Box::new(right))
    }

    /// Atoms in left-to-right order.
    pub fn atoms(&self) -> Vec<&TemporalAtom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a TemporalAtom>) {
        match self {
            StlFormula::Atom(a) => out.push(a),
            StlFormula::And(l, r) | StlFormula::Or(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            StlFormula::Atom(_) => 1,
            StlFormula::And(l, r) | StlFormula::Or(l, r) => l.atom_count() + r.atom_count(),
        }
    }

    /// Rebuild the tree with each atom replaced by `f(atom)`; connective
    /// structure is preserved.
    pub fn map_atoms(&self, f: &mut impl FnMut(&TemporalAtom) -> TemporalAtom) -> StlFormula {
        match self {
            StlFormula::Atom(a) => StlFormula::Atom(f(a)),
            StlFormula::And(l, r) => StlFormula::and(l.map_atoms(f), r.map_atoms(f)),
            StlFormula::Or(l, r) => StlFormula::or(l.map_atoms(f), r.map_atoms(f)),
        }
    }

    /// Earliest window start over all atoms.
    pub fn min_t_lo(&self) -> f64 {
        self.atoms().iter().map(|a| a.t_lo).fold(f64::INFINITY, f64::min)
    }

    /// Latest window end over all atoms.
    pub fn max_t_hi(&self) -> f64 {
        self.atoms().iter().map(|a| a.t_hi).fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when both trees have the same connective skeleton and the same
    /// temporal operator at every atom position (numeric fields and
    /// comparison directions are ignored).
    pub fn structure_matches(&self, other: &StlFormula) -> bool {
        match (self, other) {
            (StlFormula::Atom(a), StlFormula::Atom(b)) => a.op == b.op,
            (StlFormula::And(al, ar), StlFormula::And(bl, br))
            | (StlFormula::Or(al, ar), StlFormula::Or(bl, br)) => {
                al.structure_matches(bl) && ar.structure_matches(br)
            }
            _ => false,
        }
    }
}

/// Errors from the two parsers.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StlError {
    /// Malformed text: unbalanced brackets, unknown region label, bad number.
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    /// Well-formed text describing an impossible atom (inverted interval).
    #[error("invalid formula: {0}")]
    Semantics(String),
}

impl StlError {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> StlError {
        StlError::Syntax { pos, msg: msg.into() }
    }
}

pub(crate) fn check_atom_intervals(atom: &TemporalAtom) -> Result<(), StlError> {
    if !(atom.t_lo >= 0.0) {
        return Err(StlError::Semantics(format!(
            "time window starts before zero: [{}, {}]",
            atom.t_lo, atom.t_hi
        )));
    }
    if atom.t_lo > atom.t_hi {
        return Err(StlError::Semantics(format!(
            "inverted time window [{}, {}]",
            atom.t_lo, atom.t_hi
        )));
    }
    if atom.pred.x_lo > atom.pred.x_hi {
        return Err(StlError::Semantics(format!(
            "inverted space range [{}, {}]",
            atom.pred.x_lo, atom.pred.x_hi
        )));
    }
    Ok(())
}
