//! Natural-language rendering of a sampled problem.
//!
//! The output has two parts: a premises paragraph describing the rod
//! (geometry, materials, boundary data, horizon), then one clause per atom
//! joined by a connective template chosen by the formula's structure.
//! Rendering is a pure function of the system and formula, so identical
//! instances always produce identical text.

use crate::fem::{PdeKind, PdeSystem};
use crate::fmt::{g6, g9};
use crate::stl::{Comparison, StlFormula, TemporalAtom, TemporalOp};

/// Render the full problem sentence: premises first, then the constraint
/// clauses assembled by the structure template.
pub fn render_nl(sys: &PdeSystem, formula: &StlFormula) -> String {
    format!("{} {}", premises(sys), constraints(sys.kind, formula))
}

fn premises(sys: &PdeSystem) -> String {
    match sys.kind {
        PdeKind::Heat => {
            let a = &sys.materials[0];
            let b = &sys.materials[1];
            format!(
                "Consider a metallic rod of {} mm. The temperature at one end of the rod \
                 is fixed at {} K, and a heat source is applied to the other end. The \
                 temperature of the rod follows a heat equation and starts at {} K \
                 throughout. The first half of the rod has thermal conductivity {} \
                 mW*mm/K, density {} kg/mm, and specific heat capacity {} uJ/kg/K; the \
                 second half has thermal conductivity {} mW*mm/K, density {} kg/mm, and \
                 specific heat capacity {} uJ/kg/K. The simulation lasts {} seconds.",
                g6(sys.length),
                g6(sys.g0),
                g6(sys.g0),
                g6(a.kappa.expect("heat segment carries kappa")),
                g6(a.rho),
                g6(a.c.expect("heat segment carries c")),
                g6(b.kappa.expect("heat segment carries kappa")),
                g6(b.rho),
                g6(b.c.expect("heat segment carries c")),
                g6(sys.tmax),
            )
        }
        PdeKind::Wave => {
            let s = &sys.materials[0];
            let b = &sys.materials[1];
            format!(
                "Consider a metallic rod of {} mm made of a steel half and a brass half. \
                 The displacement of the rod follows a wave equation and starts from \
                 rest at zero displacement. The steel half has density {} kg/mm and \
                 Young's modulus {} N; the brass half has density {} kg/mm and Young's \
                 modulus {} N. One end of the rod is fixed, and a control force is \
                 applied to the other end. The simulation lasts {} seconds.",
                g6(sys.length),
                g6(s.rho),
                g6(s.young.expect("wave segment carries E")),
                g6(b.rho),
                g6(b.young.expect("wave segment carries E")),
                g6(sys.tmax),
            )
        }
    }
}

/// Lower-case clause for one atom, without the trailing period, e.g.
/// "for one point during the time interval 4 and 5, the temperature
/// distribution of the rod should be larger than the linear profile
/// mu0(x) = 0.25 * x + 303 between section 30 and 60".
fn clause(kind: PdeKind, idx: usize, atom: &TemporalAtom) -> String {
    let when = match atom.op {
        TemporalOp::Eventually => "for one point during the time interval",
        TemporalOp::Globally => "for all time between the time interval",
    };
    let (subject, relation) = match kind {
        PdeKind::Heat => (
            "the temperature distribution of the rod should be",
            match atom.pred.cmp {
                Comparison::Gt => "larger than",
                Comparison::Lt => "smaller than",
                Comparison::Eq => "equal to",
            },
        ),
        PdeKind::Wave => (
            "the displacement of the rod should be",
            match atom.pred.cmp {
                Comparison::Gt => "stretched over",
                Comparison::Lt => "compressed below",
                Comparison::Eq => "aligned with",
            },
        ),
    };
    format!(
        "{} {} and {}, {} {} the linear profile mu{}(x) = {} * x + {} between section {} and {}",
        when,
        g6(atom.t_lo),
        g6(atom.t_hi),
        subject,
        relation,
        idx,
        g9(atom.pred.slope),
        g9(atom.pred.intercept),
        g6(atom.pred.x_lo),
        g6(atom.pred.x_hi),
    )
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// Join the atom clauses with the template for this connective structure.
fn constraints(kind: PdeKind, formula: &StlFormula) -> String {
    let atoms = formula.atoms();
    let c: Vec<String> = atoms
        .iter()
        .enumerate()
        .map(|(i, atom)| clause(kind, i, atom))
        .collect();
    match formula {
        StlFormula::Atom(_) => format!("{}.", capitalize(&c[0])),
        StlFormula::And(l, r) => match (&**l, &**r) {
            (StlFormula::Atom(_), StlFormula::Atom(_)) => {
                format!("{}. Moreover, {}.", capitalize(&c[0]), c[1])
            }
            // ((p1 | p2) & p3)
            (StlFormula::Or(_, _), StlFormula::Atom(_)) => format!(
                "First, either satisfy the condition that {} or the condition that {}; \
                 and also satisfy the condition that {}.",
                c[0], c[1], c[2]
            ),
            // ((p1 & p2) & p3)
            (StlFormula::And(_, _), StlFormula::Atom(_)) => format!(
                "Satisfy the conditions that {}; and also {}; and also {}.",
                c[0], c[1], c[2]
            ),
            // (p1 & (p2 | p3))
            (StlFormula::Atom(_), StlFormula::Or(_, _)) => format!(
                "Satisfy {}. Afterwards, either consider {} or {}.",
                c[0], c[1], c[2]
            ),
            _ => unreachable!("structures connect at most three atoms"),
        },
        StlFormula::Or(l, r) => match (&**l, &**r) {
            (StlFormula::Atom(_), StlFormula::Atom(_)) => {
                format!("Either {}; or {}.", c[0], c[1])
            }
            // ((p1 & p2) | p3)
            (StlFormula::And(_, _), StlFormula::Atom(_)) => format!(
                "Either satisfy the conditions that {} and also {}; or satisfy the \
                 condition that {}.",
                c[0], c[1], c[2]
            ),
            // ((p1 | p2) | p3)
            (StlFormula::Or(_, _), StlFormula::Atom(_)) => format!(
                "Either satisfy the condition that {}; or the condition that {}; or \
                 the condition that {}.",
                c[0], c[1], c[2]
            ),
            // (p1 | (p2 & p3))
            (StlFormula::Atom(_), StlFormula::And(_, _)) => format!(
                "Either satisfy the condition that {}; or satisfy the conditions that \
                 {} and also {}.",
                c[0], c[1], c[2]
            ),
            _ => unreachable!("structures connect at most three atoms"),
        },
    }
}
