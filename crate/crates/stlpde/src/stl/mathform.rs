//! Math-notation syntax: `G_[4, 5] (forall x in [30, 60] (u(x) - (0.25 * x + 303) < 0))`,
//! with `^`/`∧` and `v`/`∨` connectives.  LaTeX markup (`\mathbf{G}_{[4,5]}`,
//! `\forall`, `\frac{x}{4}`, `\wedge`, `\left`/`\right`, ...) and unicode
//! operators are normalized away before parsing, so formulas can be pasted
//! straight out of typeset text.  Error positions refer to the normalized
//! string.
//!
//! A temporal operator applied to a conjunction (for `G`) or disjunction
//! (for `F`) of `forall` clauses distributes over its body:
//! `G_[4,5]((forall ... ) ^ (forall ...))` becomes a conjunction of two
//! `G`-atoms.  The other two pairings have no atom-level equivalent and are
//! rejected.

use super::linexpr::{self, Cursor};
use super::{
    check_atom_intervals, Comparison, LinearPredicate, StlError, StlFormula, TemporalAtom,
    TemporalOp,
};
use crate::fmt::{g6, g9};

/// Parse the math-notation form into a formula tree.
pub fn parse_mathform(text: &str) -> Result<StlFormula, StlError> {
    let normalized = normalize(text);
    let mut cur = Cursor::new(&normalized);
    let f = parse_or(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.err("unexpected trailing input"));
    }
    Ok(f)
}

/// Strip LaTeX markup and fold unicode operators into their ascii forms.
fn normalize(text: &str) -> String {
    let mut s = rewrite_frac(text);
    for (from, to) in [
        ("\\mathbf{G}", "G"),
        ("\\mathbf{F}", "F"),
        ("\\mathrm{G}", "G"),
        ("\\mathrm{F}", "F"),
        ("\\left.", " "),
        ("\\right.", " "),
        ("\\left", ""),
        ("\\right", ""),
        ("\\forall", " forall "),
        ("\\in", " in "),
        ("\\wedge", " ^ "),
        ("\\land", " ^ "),
        ("\\vee", " v "),
        ("\\lor", " v "),
        ("\\cdot", " * "),
        ("\\quad", " "),
        ("\\qquad", " "),
        ("\\phi", " "),
        ("\\varphi", " "),
        ("\\psi", " "),
        ("\\,", " "),
        ("\\;", " "),
        ("\\!", ""),
        ("\\\\", " "),
        ("$", ""),
        ("&", " "),
        ("∀", " forall "),
        ("∈", " in "),
        ("∧", " ^ "),
        ("∨", " v "),
        ("·", "*"),
        ("−", "-"),
        ("≤", "<="),
        ("≥", ">="),
        ("_{[", "_["),
        ("]}", "]"),
    ] {
        s = s.replace(from, to);
    }
    // Leftover grouping braces act as plain parentheses.
    let s = s.replace('{', "(").replace('}', ")");
    let s = s.trim();
    // A leading "phi =" and a sentence-final period are typesetting, not syntax.
    let s = s.strip_prefix('=').unwrap_or(s).trim();
    let s = s.strip_suffix('.').unwrap_or(s);
    s.trim().to_string()
}

/// Rewrite every `\frac{A}{B}` as `((A)/(B))`.
fn rewrite_frac(text: &str) -> String {
    let mut s = text.to_string();
    while let Some(i) = s.find("\\frac") {
        let after = i + "\\frac".len();
        let groups = brace_group(&s, after)
            .and_then(|(num, mid)| brace_group(&s, mid).map(|(den, end)| (num, den, end)));
        match groups {
            Some((num, den, end)) => {
                let replacement = format!("(({num})/({den}))");
                s.replace_range(i..end, &replacement);
            }
            None => s.replace_range(i..after, " "),
        }
    }
    s
}

/// Read a balanced `{...}` group starting at or after `from`; returns the
/// inner text and the byte offset just past the closing brace.
fn brace_group(s: &str, from: usize) -> Option<(String, usize)> {
    let rest = &s[from..];
    let open_rel = rest.find(|c: char| !c.is_whitespace())?;
    if rest[open_rel..].chars().next() != Some('{') {
        return None;
    }
    let mut depth = 0usize;
    for (i, c) in rest[open_rel..].char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    let inner = &rest[open_rel + 1..open_rel + i];
                    return Some((inner.to_string(), from + open_rel + i + 1));
                }
            }
            _ => {}
        }
    }
    None
}

fn parse_or(cur: &mut Cursor) -> Result<StlFormula, StlError> {
    let mut acc = parse_and(cur)?;
    loop {
        if cur.eat('|') || cur.eat_keyword("v") {
            let rhs = parse_and(cur)?;
            acc = StlFormula::or(acc, rhs);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_and(cur: &mut Cursor) -> Result<StlFormula, StlError> {
    let mut acc = parse_primary(cur)?;
    loop {
        if cur.eat('^') || cur.eat('&') {
            let rhs = parse_primary(cur)?;
            acc = StlFormula::and(acc, rhs);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_primary(cur: &mut Cursor) -> Result<StlFormula, StlError> {
    cur.skip_ws();
    match cur.peek() {
        Some('(') => {
            cur.bump();
            let inner = parse_or(cur)?;
            cur.expect(')')?;
            Ok(inner)
        }
        Some('G') | Some('F') => parse_temporal(cur),
        _ => Err(cur.err("expected '(', 'G', or 'F'")),
    }
}

/// Body of a temporal operator before distribution.
enum Body {
    Clause(LinearPredicate),
    And(Box<Body>, Box<Body>),
    Or(Box<Body>, Box<Body>),
}

fn parse_temporal(cur: &mut Cursor) -> Result<StlFormula, StlError> {
    let op = match cur.bump() {
        Some('G') => TemporalOp::Globally,
        Some('F') => TemporalOp::Eventually,
        _ => unreachable!("caller checked the leading letter"),
    };
    cur.expect('_')?;
    cur.expect('[')?;
    let t_lo = cur.number()?;
    cur.expect(',')?;
    let t_hi = cur.number()?;
    cur.expect(']')?;
    if !cur.eat('(') {
        return Err(cur.err("expected '(' before the forall clause"));
    }
    let body = parse_body_or(cur)?;
    cur.expect(')')?;
    distribute(op, t_lo, t_hi, body)
}

fn distribute(
    op: TemporalOp,
    t_lo: f64,
    t_hi: f64,
    body: Body,
) -> Result<StlFormula, StlError> {
    match body {
        Body::Clause(pred) => {
            let atom = TemporalAtom { op, t_lo, t_hi, pred };
            check_atom_intervals(&atom)?;
            Ok(StlFormula::Atom(atom))
        }
        Body::And(l, r) => {
            if op == TemporalOp::Eventually {
                return Err(StlError::Semantics(
                    "F over a conjunction does not reduce to atoms".into(),
                ));
            }
            Ok(StlFormula::and(
                distribute(op, t_lo, t_hi, *l)?,
                distribute(op, t_lo, t_hi, *r)?,
            ))
        }
        Body::Or(l, r) => {
            if op == TemporalOp::Globally {
                return Err(StlError::Semantics(
                    "G over a disjunction does not reduce to atoms".into(),
                ));
            }
            Ok(StlFormula::or(
                distribute(op, t_lo, t_hi, *l)?,
                distribute(op, t_lo, t_hi, *r)?,
            ))
        }
    }
}

fn parse_body_or(cur: &mut Cursor) -> Result<Body, StlError> {
    let mut acc = parse_body_and(cur)?;
    loop {
        if cur.eat('|') || cur.eat_keyword("v") {
            let rhs = parse_body_and(cur)?;
            acc = Body::Or(Box::new(acc), Box::new(rhs));
        } else {
            return Ok(acc);
        }
    }
}

fn parse_body_and(cur: &mut Cursor) -> Result<Body, StlError> {
    let mut acc = parse_body_primary(cur)?;
    loop {
        if cur.eat('^') || cur.eat('&') {
            let rhs = parse_body_primary(cur)?;
            acc = Body::And(Box::new(acc), Box::new(rhs));
        } else {
            return Ok(acc);
        }
    }
}

fn parse_body_primary(cur: &mut Cursor) -> Result<Body, StlError> {
    cur.skip_ws();
    if cur.peek() == Some('(') {
        // Either a grouped body or parentheses that belong to the clause
        // expression itself; try the group first and fall back.  A semantics
        // error means the text parsed fine and the content is wrong, so
        // rereading it under the other grammar would only bury the message.
        let mark = cur.pos;
        cur.bump();
        match parse_body_or(cur) {
            Ok(inner) => {
                if cur.eat(')') {
                    return Ok(inner);
                }
            }
            Err(err @ StlError::Semantics(_)) => return Err(err),
            Err(StlError::Syntax { .. }) => {}
        }
        cur.pos = mark;
    }
    Ok(Body::Clause(parse_clause(cur)?))
}

/// `forall x in [x1, x2] (<comparison>)` — the trailing `:`/`,` after the
/// range and the parentheses around the comparison are optional.
fn parse_clause(cur: &mut Cursor) -> Result<LinearPredicate, StlError> {
    cur.skip_ws();
    if !cur.eat_keyword("forall") {
        return Err(cur.err("expected 'forall'"));
    }
    if !cur.eat_keyword("x") {
        return Err(cur.err("expected 'x' after 'forall'"));
    }
    if !cur.eat_keyword("in") {
        return Err(cur.err("expected 'in'"));
    }
    cur.expect('[')?;
    let x_lo = cur.number()?;
    cur.expect(',')?;
    let x_hi = cur.number()?;
    cur.expect(']')?;
    let _ = cur.eat(':') || cur.eat(',');

    // The comparison may be wrapped in its own parentheses, but an opening
    // '(' can also start the left-hand expression; try and fall back.
    let mark = cur.pos;
    if cur.eat('(') {
        match parse_comparison(cur) {
            Ok(cmp) => {
                if cur.eat(')') {
                    return finish_clause(x_lo, x_hi, cmp);
                }
            }
            Err(err @ StlError::Semantics(_)) => return Err(err),
            Err(StlError::Syntax { .. }) => {}
        }
        cur.pos = mark;
    }
    let cmp = parse_comparison(cur)?;
    finish_clause(x_lo, x_hi, cmp)
}

fn finish_clause(
    x_lo: f64,
    x_hi: f64,
    (cmp, slope, intercept): (Comparison, f64, f64),
) -> Result<LinearPredicate, StlError> {
    if !(x_lo <= x_hi) {
        return Err(StlError::Semantics(format!(
            "space range is inverted: [{x_lo}, {x_hi}]"
        )));
    }
    Ok(LinearPredicate { x_lo, x_hi, cmp, slope, intercept })
}

/// Parse `<expr> <op> <expr>` and solve for `u` against the linear profile:
/// the difference `lhs - rhs = cu·u + s·x + c` is rescaled to
/// `u <op'> a·x + b` with `a = -s/cu`, `b = -c/cu`, flipping the comparison
/// when `cu` is negative.
fn parse_comparison(cur: &mut Cursor) -> Result<(Comparison, f64, f64), StlError> {
    let lhs = linexpr::parse_expr(cur)?;
    cur.skip_ws();
    let op_pos = cur.pos;
    let cmp = match cur.bump() {
        Some('<') => {
            if cur.peek() == Some('=') {
                cur.bump();
            }
            Comparison::Lt
        }
        Some('>') => {
            if cur.peek() == Some('=') {
                cur.bump();
            }
            Comparison::Gt
        }
        Some('=') => {
            if cur.peek() == Some('=') {
                cur.bump();
            }
            Comparison::Eq
        }
        _ => return Err(StlError::syntax(op_pos, "expected '<', '>', or '='")),
    };
    let rhs = linexpr::parse_expr(cur)?;

    let cu = lhs.u - rhs.u;
    let s = lhs.x - rhs.x;
    let c = lhs.c - rhs.c;
    if cu == 0.0 {
        return Err(StlError::Semantics(
            "comparison does not involve u".into(),
        ));
    }
    let flip = cu < 0.0;
    let a = norm_zero(-(s / cu));
    let b = norm_zero(-(c / cu));
    let cmp = if flip {
        match cmp {
            Comparison::Lt => Comparison::Gt,
            Comparison::Gt => Comparison::Lt,
            Comparison::Eq => Comparison::Eq,
        }
    } else {
        cmp
    };
    Ok((cmp, a, b))
}

fn norm_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Print a formula in math notation.
pub fn print_mathform(f: &StlFormula) -> String {
    match f {
        StlFormula::Atom(atom) => print_atom(atom),
        StlFormula::And(l, r) => format!("({} ^ {})", print_mathform(l), print_mathform(r)),
        StlFormula::Or(l, r) => format!("({} v {})", print_mathform(l), print_mathform(r)),
    }
}

fn print_atom(atom: &TemporalAtom) -> String {
    format!(
        "{}_[{}, {}] (forall x in [{}, {}] (u(x) - {} {} 0))",
        atom.op.letter(),
        g6(atom.t_lo),
        g6(atom.t_hi),
        g6(atom.pred.x_lo),
        g6(atom.pred.x_hi),
        print_profile(&atom.pred),
        atom.pred.cmp.symbol(),
    )
}

fn print_profile(pred: &LinearPredicate) -> String {
    let (a, b) = (pred.slope, pred.intercept);
    if a == 0.0 {
        if b == 0.0 {
            "0".to_string()
        } else if b > 0.0 {
            g9(b)
        } else {
            format!("({})", g9(b))
        }
    } else if b == 0.0 {
        format!("({} * x)", g9(a))
    } else if b > 0.0 {
        format!("({} * x + {})", g9(a), g9(b))
    } else {
        format!("({} * x - {})", g9(a), g9(-b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_latex_band_plus_cap_formula() {
        let text = r"\phi=\mathbf{G}_{[4,5]}\left(\left(\forall x \in[30,60]: u(x)-\left(\frac{x}{4}+303\right)<0\right) \wedge\right. \left.\quad\left(\forall x \in[30,60]: u(x)-\left(\frac{x}{4}+297\right)>0\right)\right) \wedge \mathbf{G}_{[0,5]}(\forall x \in[100,100]: u(x)-345<0).";
        let f = parse_mathform(text).unwrap();
        match &f {
            StlFormula::And(l, r) => {
                assert!(matches!(**l, StlFormula::And(_, _)));
                assert!(matches!(**r, StlFormula::Atom(_)));
            }
            other => panic!("expected And at the root, got {other:?}"),
        }
        let atoms = f.atoms();
        assert_eq!(atoms.len(), 3);

        assert_eq!((atoms[0].t_lo, atoms[0].t_hi), (4.0, 5.0));
        assert_eq!((atoms[0].pred.x_lo, atoms[0].pred.x_hi), (30.0, 60.0));
        assert_eq!(atoms[0].pred.cmp, Comparison::Lt);
        assert_eq!((atoms[0].pred.slope, atoms[0].pred.intercept), (0.25, 303.0));

        assert_eq!(atoms[1].pred.cmp, Comparison::Gt);
        assert_eq!((atoms[1].pred.slope, atoms[1].pred.intercept), (0.25, 297.0));

        assert_eq!((atoms[2].t_lo, atoms[2].t_hi), (0.0, 5.0));
        assert_eq!((atoms[2].pred.x_lo, atoms[2].pred.x_hi), (100.0, 100.0));
        assert_eq!(atoms[2].pred.cmp, Comparison::Lt);
        assert_eq!((atoms[2].pred.slope, atoms[2].pred.intercept), (0.0, 345.0));
    }

    #[test]
    fn parses_the_unicode_form() {
        let text = "G_[4,5](∀x∈[30,60]: u(x)−(x/4+303)<0) ∧ G_[0,5](∀x∈[100,100]: u(x)−345<0)";
        let f = parse_mathform(text).unwrap();
        let atoms = f.atoms();
        assert_eq!(atoms.len(), 2);
        assert_eq!((atoms[0].pred.slope, atoms[0].pred.intercept), (0.25, 303.0));
        assert_eq!(atoms[1].pred.intercept, 345.0);
    }

    #[test]
    fn parses_a_plain_single_atom() {
        let text = "G_[2.62, 4.50] (forall x in [22, 87] (u(x) - (-0.0122 * x + 294.2976) > 0))";
        let f = parse_mathform(text).unwrap();
        match f {
            StlFormula::Atom(atom) => {
                assert_eq!(atom.op, TemporalOp::Globally);
                assert_eq!((atom.t_lo, atom.t_hi), (2.62, 4.50));
                assert_eq!((atom.pred.x_lo, atom.pred.x_hi), (22.0, 87.0));
                assert_eq!(atom.pred.cmp, Comparison::Gt);
                assert_eq!(atom.pred.slope, -0.0122);
                assert_eq!(atom.pred.intercept, 294.2976);
            }
            other => panic!("expected a single atom, got {other:?}"),
        }
    }

    #[test]
    fn profile_may_sit_on_the_left() {
        let f = parse_mathform("G_[0, 1] (forall x in [0, 10] ((x/4 + 303) - u(x) > 0))")
            .unwrap();
        let atoms = f.atoms();
        assert_eq!(atoms[0].pred.cmp, Comparison::Lt);
        assert_eq!((atoms[0].pred.slope, atoms[0].pred.intercept), (0.25, 303.0));
    }

    #[test]
    fn direct_comparison_without_subtraction() {
        let f = parse_mathform("G_[0, 1] (forall x in [0, 10] (u(x) < 2 * x + 7))").unwrap();
        let atoms = f.atoms();
        assert_eq!(atoms[0].pred.cmp, Comparison::Lt);
        assert_eq!((atoms[0].pred.slope, atoms[0].pred.intercept), (2.0, 7.0));
    }

    #[test]
    fn empty_text_is_a_syntax_error() {
        assert!(matches!(parse_mathform(""), Err(StlError::Syntax { .. })));
        assert!(matches!(parse_mathform("   "), Err(StlError::Syntax { .. })));
    }

    #[test]
    fn illegal_distribution_is_rejected() {
        let g_over_or = "G_[0, 1] ((forall x in [0, 1] (u(x) < 0)) v (forall x in [0, 1] (u(x) > 0)))";
        assert!(matches!(parse_mathform(g_over_or), Err(StlError::Semantics(_))));
        let f_over_and = "F_[0, 1] ((forall x in [0, 1] (u(x) < 0)) ^ (forall x in [0, 1] (u(x) > 0)))";
        assert!(matches!(parse_mathform(f_over_and), Err(StlError::Semantics(_))));
    }

    #[test]
    fn legal_distribution_splits_atoms() {
        let text = "F_[0, 2] ((forall x in [0, 1] (u(x) < 0)) v (forall x in [3, 4] (u(x) > 0)))";
        let f = parse_mathform(text).unwrap();
        match &f {
            StlFormula::Or(l, r) => {
                assert!(matches!(**l, StlFormula::Atom(_)));
                assert!(matches!(**r, StlFormula::Atom(_)));
            }
            other => panic!("expected Or, got {other:?}"),
        }
        for atom in f.atoms() {
            assert_eq!(atom.op, TemporalOp::Eventually);
            assert_eq!((atom.t_lo, atom.t_hi), (0.0, 2.0));
        }
    }

    #[test]
    fn comparison_must_involve_u() {
        let text = "G_[0, 1] (forall x in [0, 1] (x + 1 < 2))";
        assert!(matches!(parse_mathform(text), Err(StlError::Semantics(_))));
    }

    #[test]
    fn inverted_intervals_are_semantics_errors() {
        for text in [
            "G_[1, 0] (forall x in [0, 1] (u(x) < 0))",
            "G_[0, 1] (forall x in [1, 0] (u(x) < 0))",
        ] {
            assert!(matches!(parse_mathform(text), Err(StlError::Semantics(_))), "{text}");
        }
    }

    #[test]
    fn printing_round_trips() {
        let text = "G_[2.62, 4.5] (forall x in [22, 87] (u(x) - (-0.0122 * x + 294.2976) > 0))";
        let f = parse_mathform(text).unwrap();
        assert_eq!(print_mathform(&f), text);
        let reparsed = parse_mathform(&print_mathform(&f)).unwrap();
        assert_eq!(reparsed, f);
    }

    #[test]
    fn printed_trees_keep_their_shape() {
        let text = "G_[4,5](∀x∈[30,60]: u(x)−(x/4+303)<0) ∧ (F_[0,5](∀x∈[100,100]: u(x)−345<0) ∨ G_[1,2](∀x∈[5,6]: u(x)>1))";
        let f = parse_mathform(text).unwrap();
        let printed = print_mathform(&f);
        assert_eq!(parse_mathform(&printed).unwrap(), f);
        assert_eq!(
            printed,
            "(G_[4, 5] (forall x in [30, 60] (u(x) - (0.25 * x + 303) < 0)) ^ (F_[0, 5] (forall x in [100, 100] (u(x) - 345 < 0)) v G_[1, 2] (forall x in [5, 6] (u(x) - 1 > 0))))"
        );
    }

    #[test]
    fn negative_sided_profiles_print_and_reparse() {
        for (a, b) in [(0.0, -2.5), (-1.5, 0.0), (2.0, -3.25), (0.0, 0.0)] {
            let atom = TemporalAtom {
                op: TemporalOp::Globally,
                t_lo: 0.0,
                t_hi: 1.0,
                pred: LinearPredicate {
                    x_lo: 0.0,
                    x_hi: 10.0,
                    cmp: Comparison::Lt,
                    slope: a,
                    intercept: b,
                },
            };
            let f = StlFormula::Atom(atom);
            let printed = print_mathform(&f);
            let reparsed = parse_mathform(&printed).unwrap();
            assert_eq!(reparsed, f, "printed form: {printed}");
        }
    }
}
