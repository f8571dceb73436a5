//! Region-label syntax: a formula is a connective skeleton over `G_[a, b]` /
//! `F_[a, b]` atoms whose spatial predicates live in a side map keyed by
//! label, e.g. `((G_[0.049, 0.053] (A)) & (F_[0.051, 0.149] (B)))` with
//! `A = [9829, 19907], "<", 1.882e-05 * x + 0.187`.

use std::collections::BTreeMap;

use super::linexpr::{self, Cursor};
use super::{
    check_atom_intervals, Comparison, LinearPredicate, StlError, StlFormula, TemporalAtom,
    TemporalOp,
};
use crate::fmt::g6;

/// Spatial predicates by region label.
pub type RegionMap = BTreeMap<String, LinearPredicate>;

/// Parse a connective skeleton against its region map.
pub fn parse_cspec(regions: &RegionMap, text: &str) -> Result<StlFormula, StlError> {
    let mut cur = Cursor::new(text);
    let f = parse_or(&mut cur, regions)?;
    if !cur.at_end() {
        return Err(cur.err("unexpected trailing input"));
    }
    Ok(f)
}

fn parse_or(cur: &mut Cursor, regions: &RegionMap) -> Result<StlFormula, StlError> {
    let mut acc = parse_and(cur, regions)?;
    while cur.eat('|') {
        let rhs = parse_and(cur, regions)?;
        acc = StlFormula::or(acc, rhs);
    }
    Ok(acc)
}

fn parse_and(cur: &mut Cursor, regions: &RegionMap) -> Result<StlFormula, StlError> {
    let mut acc = parse_primary(cur, regions)?;
    while cur.eat('&') {
        let rhs = parse_primary(cur, regions)?;
        acc = StlFormula::and(acc, rhs);
    }
    Ok(acc)
}

fn parse_primary(cur: &mut Cursor, regions: &RegionMap) -> Result<StlFormula, StlError> {
    cur.skip_ws();
    match cur.peek() {
        Some('(') => {
            cur.bump();
            let inner = parse_or(cur, regions)?;
            cur.expect(')')?;
            Ok(inner)
        }
        Some('G') | Some('F') => parse_atom(cur, regions),
        _ => Err(cur.err("expected '(', 'G', or 'F'")),
    }
}

fn parse_atom(cur: &mut Cursor, regions: &RegionMap) -> Result<StlFormula, StlError> {
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

    // The region operand: `(A)` or a bare label.
    let parenthesized = cur.eat('(');
    cur.skip_ws();
    let label_pos = cur.pos;
    let label = cur
        .ident()
        .ok_or_else(|| StlError::syntax(label_pos, "expected a region label"))?;
    if parenthesized {
        cur.expect(')')?;
    }
    let pred = regions
        .get(&label)
        .ok_or_else(|| StlError::syntax(label_pos, format!("unknown region label '{label}'")))?
        .clone();

    let atom = TemporalAtom { op, t_lo, t_hi, pred };
    check_atom_intervals(&atom)?;
    Ok(StlFormula::Atom(atom))
}

/// Print a formula as a cspec string plus the region map it references.
/// Labels are assigned `A`, `B`, ... in left-to-right atom order.
pub fn print_cspec(f: &StlFormula) -> (RegionMap, String) {
    let mut regions = RegionMap::new();
    let mut next = 0usize;
    let text = print_node(f, &mut regions, &mut next);
    (regions, text)
}

fn print_node(f: &StlFormula, regions: &mut RegionMap, next: &mut usize) -> String {
    match f {
        StlFormula::Atom(atom) => {
            let label = region_label(*next);
            *next += 1;
            regions.insert(label.clone(), atom.pred.clone());
            format!(
                "({}_[{}, {}] ({}))",
                atom.op.letter(),
                g6(atom.t_lo),
                g6(atom.t_hi),
                label
            )
        }
        StlFormula::And(l, r) => {
            let ls = print_node(l, regions, next);
            let rs = print_node(r, regions, next);
            format!("({ls} & {rs})")
        }
        StlFormula::Or(l, r) => {
            let ls = print_node(l, regions, next);
            let rs = print_node(r, regions, next);
            format!("({ls} | {rs})")
        }
    }
}

/// `0 → A`, `25 → Z`, `26 → AA`, ...
fn region_label(i: usize) -> String {
    let mut n = i as i64;
    let mut bytes = Vec::new();
    loop {
        bytes.push(b'A' + (n % 26) as u8);
        n = n / 26 - 1;
        if n < 0 {
            break;
        }
    }
    bytes.reverse();
    String::from_utf8(bytes).expect("label bytes are ASCII")
}

/// Parse the textual region form: `[x1, x2], "<", a * x + b`.
pub(super) fn parse_region_text(text: &str) -> Result<LinearPredicate, StlError> {
    let mut cur = Cursor::new(text);
    cur.expect('[')?;
    let x_lo = cur.number()?;
    cur.expect(',')?;
    let x_hi = cur.number()?;
    cur.expect(']')?;
    cur.expect(',')?;

    let quote = if cur.eat('"') {
        Some('"')
    } else if cur.eat('\'') {
        Some('\'')
    } else {
        None
    };
    cur.skip_ws();
    let cmp_pos = cur.pos;
    let cmp = match cur.bump() {
        Some('<') | Some('≤') => {
            if cur.peek() == Some('=') {
                cur.bump();
            }
            Comparison::Lt
        }
        Some('>') | Some('≥') => {
            if cur.peek() == Some('=') {
                cur.bump();
            }
            Comparison::Gt
        }
        Some('=') => Comparison::Eq,
        _ => return Err(StlError::syntax(cmp_pos, "expected '<', '>', or '='")),
    };
    if let Some(q) = quote {
        cur.expect(q)?;
    }
    cur.expect(',')?;

    let lin = linexpr::parse_expr(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.err("unexpected trailing input"));
    }
    if lin.u != 0.0 {
        return Err(cur.err("region profile must not reference u"));
    }

    let pred = LinearPredicate { x_lo, x_hi, cmp, slope: lin.x, intercept: lin.c };
    if !(pred.x_lo <= pred.x_hi) {
        return Err(StlError::Semantics(format!(
            "space range is inverted: [{}, {}]",
            pred.x_lo, pred.x_hi
        )));
    }
    Ok(pred)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(text: &str) -> LinearPredicate {
        LinearPredicate::parse_text(text).unwrap()
    }

    fn three_region_map() -> RegionMap {
        let mut m = RegionMap::new();
        m.insert("A".into(), region(r#"[9829, 19907], "<", 1.882e-05·x+0.187"#));
        m.insert("B".into(), region(r#"[40199, 56082], "<", 3.356e-06·x−0.510"#));
        m.insert("C".into(), region(r#"[75646, 98769], ">", −1.390e-05·x+2.844"#));
        m
    }

    #[test]
    fn parses_three_atom_skeleton() {
        let regions = three_region_map();
        let text =
            "(((G_[0.049, 0.053] (A)) & (F_[0.051, 0.149] (B))) | (F_[0.061, 0.169] (C)))";
        let f = parse_cspec(&regions, text).unwrap();
        match &f {
            StlFormula::Or(l, r) => {
                assert!(matches!(**l, StlFormula::And(_, _)));
                assert!(matches!(**r, StlFormula::Atom(_)));
            }
            other => panic!("expected Or at the root, got {other:?}"),
        }
        let atoms = f.atoms();
        assert_eq!(atoms.len(), 3);
        assert_eq!(atoms[0].op, TemporalOp::Globally);
        assert_eq!((atoms[0].t_lo, atoms[0].t_hi), (0.049, 0.053));
        assert_eq!(atoms[0].pred.slope, 1.882e-5);
        assert_eq!(atoms[1].pred.intercept, -0.510);
        assert_eq!(atoms[2].pred.cmp, Comparison::Gt);
        assert_eq!(atoms[2].pred.slope, -1.390e-5);
    }

    #[test]
    fn single_atom_round_trip() {
        let mut regions = RegionMap::new();
        regions.insert("A".into(), region("[0, 1], \"<\", 2 * x + 1"));
        let f = parse_cspec(&regions, "(G_[0, 1] (A))").unwrap();
        let (out_regions, out_text) = print_cspec(&f);
        assert_eq!(out_text, "(G_[0, 1] (A))");
        assert_eq!(out_regions, regions);
    }

    #[test]
    fn three_atom_round_trip() {
        let regions = three_region_map();
        let text =
            "(((G_[0.049, 0.053] (A)) & (F_[0.051, 0.149] (B))) | (F_[0.061, 0.169] (C)))";
        let f = parse_cspec(&regions, text).unwrap();
        let (out_regions, out_text) = print_cspec(&f);
        assert_eq!(out_text, text);
        assert_eq!(out_regions, regions);
        let reparsed = parse_cspec(&out_regions, &out_text).unwrap();
        assert_eq!(reparsed, f);
    }

    #[test]
    fn inverted_window_is_a_semantics_error() {
        let mut regions = RegionMap::new();
        regions.insert("A".into(), region("[0, 1], \"<\", x"));
        match parse_cspec(&regions, "(G_[1, 0] (A))") {
            Err(StlError::Semantics(msg)) => assert!(msg.contains("window"), "{msg}"),
            other => panic!("expected a semantics error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let mut regions = RegionMap::new();
        regions.insert("A".into(), region("[0, 1], \"<\", x"));
        for bad in [
            "((G_[0, 1] (A))",   // unbalanced
            "(G_[0, 1] (B))",    // unknown label
            "(G_[0, 1e] (A))",   // malformed number (bare exponent then ']')
            "(G_[0, 1] (A)) &",  // dangling connective
            "(G_[0, 1] (A)) (G_[0, 1] (A))", // trailing junk
        ] {
            match parse_cspec(&regions, bad) {
                Err(StlError::Syntax { .. }) => {}
                other => panic!("{bad:?}: expected a syntax error, got {other:?}"),
            }
        }
    }

    #[test]
    fn bare_labels_and_loose_whitespace_parse() {
        let mut regions = RegionMap::new();
        regions.insert("A".into(), region("[0, 1], \"<\", x"));
        regions.insert("B".into(), region("[0, 1], \">\", x"));
        let f = parse_cspec(&regions, "G_[0,1] A & F_[ 0 , 1 ] B").unwrap();
        assert!(matches!(f, StlFormula::And(_, _)));
    }

    #[test]
    fn connective_chains_associate_left() {
        let mut regions = RegionMap::new();
        for l in ["A", "B", "C"] {
            regions.insert(l.into(), region("[0, 1], \"<\", x"));
        }
        let f = parse_cspec(&regions, "(G_[0, 1] (A)) & (G_[0, 2] (B)) & (G_[0, 3] (C))")
            .unwrap();
        match f {
            StlFormula::And(l, r) => {
                assert!(matches!(*l, StlFormula::And(_, _)));
                assert!(matches!(*r, StlFormula::Atom(_)));
            }
            other => panic!("expected left-associated And, got {other:?}"),
        }
    }

    #[test]
    fn and_binds_tighter_than_or() {
        let mut regions = RegionMap::new();
        for l in ["A", "B", "C"] {
            regions.insert(l.into(), region("[0, 1], \"<\", x"));
        }
        let f = parse_cspec(&regions, "G_[0,1] A | G_[0,1] B & G_[0,1] C").unwrap();
        match f {
            StlFormula::Or(l, r) => {
                assert!(matches!(*l, StlFormula::Atom(_)));
                assert!(matches!(*r, StlFormula::And(_, _)));
            }
            other => panic!("expected Or at the root, got {other:?}"),
        }
    }

    #[test]
    fn region_text_rejects_bad_input() {
        assert!(LinearPredicate::parse_text("[1, 0], \"<\", x").is_err());
        assert!(LinearPredicate::parse_text("[0, 1], \"?\", x").is_err());
        assert!(LinearPredicate::parse_text("[0, 1], \"<\", u(x) + 1").is_err());
        assert!(LinearPredicate::parse_text("[0, 1], \"<\", x * x").is_err());
    }

    #[test]
    fn labels_extend_past_z() {
        assert_eq!(region_label(0), "A");
        assert_eq!(region_label(25), "Z");
        assert_eq!(region_label(26), "AA");
        assert_eq!(region_label(27), "AB");
        assert_eq!(region_label(2 * 26 + 1), "BB");
    }
}
