//! LP file exchange: write a model out, read one back, and solve a file the
//! slow-but-sure way (binary enumeration over the parsed model).
//!
//! The dialect is the common CPLEX-LP subset: `Maximize`/`Minimize`,
//! `Subject To`, `Bounds`, `Binaries`, `End`, with `\` starting a comment.
//! Numbers are printed in shortest round-trip form, so a written file parses
//! back to bit-identical coefficients.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::simplex::{solve_lp, LpProblem, LpRow, LpStatus, RowOp};
use super::{MilpError, MilpModel};

const WRAP_COL: usize = 240;

/// Shortest exact decimal for an LP file token.
fn lpnum(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 1e15 || v.abs() < 1e-5 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn push_wrapped(out: &mut String, line: String) {
    if line.len() <= WRAP_COL {
        out.push_str(&line);
        out.push('\n');
        return;
    }
    let mut col = 0;
    for (i, piece) in line.split(' ').enumerate() {
        if i > 0 && col + piece.len() + 1 > WRAP_COL {
            out.push_str("\n  ");
            col = 2;
        } else if i > 0 {
            out.push(' ');
            col += 1;
        }
        out.push_str(piece);
        col += piece.len();
    }
    out.push('\n');
}

fn append_terms(line: &mut String, terms: &[(usize, f64)], names: impl Fn(usize) -> String) {
    for (pos, &(j, c)) in terms.iter().enumerate() {
        if pos == 0 {
            if c < 0.0 {
                line.push_str("- ");
            }
        } else if c < 0.0 {
            line.push_str(" - ");
        } else {
            line.push_str(" + ");
        }
        let mag = c.abs();
        if mag != 1.0 {
            let _ = write!(line, "{} ", lpnum(mag));
        }
        line.push_str(&names(j));
    }
}

pub fn write_lp(m: &MilpModel) -> String {
    let name = |j: usize| m.vars[j].name.clone();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ robustness model: {} rod, nx={}, nt={}, {} vars, {} rows",
        match m.system.kind {
            crate::fem::PdeKind::Heat => "heat",
            crate::fem::PdeKind::Wave => "wave",
        },
        m.disc.nx,
        m.disc.nt,
        m.vars.len(),
        m.rows.len()
    );
    out.push_str("Maximize\n");
    push_wrapped(&mut out, format!(" obj: {}", name(m.objective_var)));
    out.push_str("Subject To\n");
    for row in &m.rows {
        let mut line = format!(" {}: ", row.name);
        append_terms(&mut line, &row.terms, name);
        let op = match row.op {
            RowOp::Le => "<=",
            RowOp::Ge => ">=",
            RowOp::Eq => "=",
        };
        let _ = write!(line, " {} {}", op, lpnum(row.rhs));
        push_wrapped(&mut out, line);
    }
    out.push_str("Bounds\n");
    for v in &m.vars {
        if !v.binary {
            push_wrapped(&mut out, format!(" {} <= {} <= {}", lpnum(v.lo), v.name, lpnum(v.hi)));
        }
    }
    if m.vars.iter().any(|v| v.binary) {
        out.push_str("Binaries\n");
        for v in &m.vars {
            if v.binary {
                let _ = writeln!(out, " {}", v.name);
            }
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedLpRow {
    pub name: String,
    pub terms: Vec<(String, f64)>,
    pub op: RowOp,
    pub rhs: f64,
}

/// An LP file read back into named form.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedLp {
    pub maximize: bool,
    pub objective: Vec<(String, f64)>,
    pub obj_const: f64,
    pub rows: Vec<ParsedLpRow>,
    /// Explicit bound statements in file order: (name, lo, hi), either side
    /// possibly infinite.
    pub bounds: Vec<(String, f64, f64)>,
    pub binaries: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Plus,
    Minus,
    Star,
    Colon,
    Le,
    Ge,
    Eq,
}

fn lex(text: &str) -> Result<Vec<Tok>, MilpError> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    let err = |pos: usize, msg: &str| MilpError::LpParse(format!("byte {pos}: {msg}"));
    while let Some(&(pos, ch)) = chars.peek() {
        match ch {
            '\\' => {
                for (_, c) in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '+' => {
                chars.next();
                toks.push(Tok::Plus);
            }
            '-' => {
                chars.next();
                toks.push(Tok::Minus);
            }
            '*' => {
                chars.next();
                toks.push(Tok::Star);
            }
            ':' => {
                chars.next();
                toks.push(Tok::Colon);
            }
            '<' | '>' | '=' => {
                chars.next();
                if let Some(&(_, '=')) = chars.peek() {
                    chars.next();
                }
                toks.push(match ch {
                    '<' => Tok::Le,
                    '>' => Tok::Ge,
                    _ => Tok::Eq,
                });
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = pos;
                let mut end = pos;
                let mut seen_exp = false;
                while let Some(&(p, c2)) = chars.peek() {
                    let take = c2.is_ascii_digit()
                        || c2 == '.'
                        || (!seen_exp && (c2 == 'e' || c2 == 'E'))
                        || (seen_exp
                            && (c2 == '+' || c2 == '-')
                            && text[start..p].ends_with(['e', 'E']));
                    if !take {
                        break;
                    }
                    if c2 == 'e' || c2 == 'E' {
                        seen_exp = true;
                    }
                    end = p + c2.len_utf8();
                    chars.next();
                }
                let lit = &text[start..end];
                let v: f64 = lit
                    .parse()
                    .map_err(|_| err(start, &format!("bad number {lit:?}")))?;
                toks.push(Tok::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = pos;
                let mut end = pos;
                while let Some(&(p, c2)) = chars.peek() {
                    if c2.is_ascii_alphanumeric() || c2 == '_' || c2 == '.' {
                        end = p + c2.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Ident(text[start..end].to_string()));
            }
            _ => return Err(err(pos, &format!("unexpected character {ch:?}"))),
        }
    }
    Ok(toks)
}

fn keyword(t: &Tok) -> Option<&'static str> {
    let Tok::Ident(s) = t else { return None };
    match s.to_ascii_lowercase().as_str() {
        "maximize" | "maximise" | "max" => Some("maximize"),
        "minimize" | "minimise" | "min" => Some("minimize"),
        "subject" => Some("subject"),
        "st" => Some("st"),
        "bounds" | "bound" => Some("bounds"),
        "binaries" | "binary" | "bin" => Some("binaries"),
        "general" | "generals" | "gen" => Some("general"),
        "semi" | "semis" | "sos" => Some("unsupported"),
        "end" => Some("end"),
        "free" => Some("free"),
        "infinity" | "inf" => Some("infinity"),
        _ => None,
    }
}

/// True for idents that begin a new section.
fn section_start(t: &Tok) -> bool {
    matches!(
        keyword(t),
        Some("maximize" | "minimize" | "subject" | "st" | "bounds" | "binaries" | "general" | "unsupported" | "end")
    )
}

struct Parser {
    toks: Vec<Tok>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn err(&self, msg: &str) -> MilpError {
        MilpError::LpParse(format!("token {}: {}", self.at, msg))
    }

    /// Parse a linear expression until a relational operator or section
    /// boundary: returns (terms, constant).
    fn expr(&mut self) -> Result<(Vec<(String, f64)>, f64), MilpError> {
        let mut terms = Vec::new();
        let mut constant = 0.0;
        let mut first = true;
        loop {
            let mut sign = 1.0;
            let mut signed = false;
            while let Some(t) = self.peek() {
                match t {
                    Tok::Plus => {
                        self.bump();
                        signed = true;
                    }
                    Tok::Minus => {
                        sign = -sign;
                        self.bump();
                        signed = true;
                    }
                    _ => break,
                }
            }
            match self.peek() {
                Some(Tok::Num(_)) => {
                    let Some(Tok::Num(v)) = self.bump() else { unreachable!() };
                    if let Some(Tok::Star) = self.peek() {
                        self.bump();
                    }
                    // An ident right after a number is this term's variable —
                    // unless a colon follows, making it the next row's label.
                    let labels_next_row =
                        matches!(self.toks.get(self.at + 1), Some(Tok::Colon));
                    match self.peek() {
                        Some(t @ Tok::Ident(_)) if !section_start(t) && !labels_next_row => {
                            let Some(Tok::Ident(name)) = self.bump() else { unreachable!() };
                            terms.push((name, sign * v));
                        }
                        _ => constant += sign * v,
                    }
                }
                Some(Tok::Ident(_)) if !section_start(self.peek().expect("peeked")) => {
                    let Some(Tok::Ident(name)) = self.bump() else { unreachable!() };
                    terms.push((name, sign));
                }
                _ => {
                    if signed {
                        return Err(self.err("dangling sign in expression"));
                    }
                    if first {
                        return Err(self.err("empty expression"));
                    }
                    break;
                }
            }
            first = false;
            match self.peek() {
                Some(Tok::Plus | Tok::Minus) => continue,
                _ => break,
            }
        }
        Ok((terms, constant))
    }
}

pub fn parse_lp(text: &str) -> Result<ParsedLp, MilpError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let sense = p.bump().ok_or_else(|| p.err("empty file"))?;
    let maximize = match keyword(&sense) {
        Some("maximize") => true,
        Some("minimize") => false,
        _ => return Err(p.err("expected Maximize or Minimize")),
    };

    // Objective: optional `name:` then the expression.
    if matches!((p.peek(), p.toks.get(p.at + 1)), (Some(Tok::Ident(_)), Some(Tok::Colon))) {
        p.bump();
        p.bump();
    }
    let (objective, obj_const) = p.expr()?;

    match p.bump() {
        Some(ref t) if keyword(t) == Some("subject") => match p.bump() {
            Some(Tok::Ident(ref to)) if to.eq_ignore_ascii_case("to") => {}
            _ => return Err(p.err("expected To after Subject")),
        },
        Some(ref t) if keyword(t) == Some("st") => {}
        _ => return Err(p.err("expected Subject To")),
    }

    let mut rows = Vec::new();
    loop {
        match p.peek() {
            None => break,
            Some(t) if section_start(t) && keyword(t) != Some("st") => break,
            _ => {}
        }
        let name = if matches!(
            (p.peek(), p.toks.get(p.at + 1)),
            (Some(Tok::Ident(_)), Some(Tok::Colon))
        ) {
            let Some(Tok::Ident(n)) = p.bump() else { unreachable!() };
            p.bump();
            n
        } else {
            format!("c{}", rows.len())
        };
        let (lhs, lhs_const) = p.expr()?;
        let op = match p.bump() {
            Some(Tok::Le) => RowOp::Le,
            Some(Tok::Ge) => RowOp::Ge,
            Some(Tok::Eq) => RowOp::Eq,
            _ => return Err(p.err(&format!("constraint {name}: expected <=, >=, or ="))),
        };
        let (rhs_terms, rhs_const) = p.expr()?;
        let mut terms = lhs;
        for (n, c) in rhs_terms {
            terms.push((n, -c));
        }
        rows.push(ParsedLpRow { name, terms, op, rhs: rhs_const - lhs_const });
    }

    let mut bounds = Vec::new();
    let mut binaries = Vec::new();
    while let Some(t) = p.peek().cloned() {
        match keyword(&t) {
            Some("end") => {
                p.bump();
                break;
            }
            Some("bounds") => {
                p.bump();
                loop {
                    match p.peek() {
                        None => break,
                        Some(t) if section_start(t) => break,
                        _ => {}
                    }
                    bounds.push(parse_bound(&mut p)?);
                }
            }
            Some("binaries") => {
                p.bump();
                loop {
                    match p.peek() {
                        None => break,
                        Some(t) if section_start(t) => break,
                        Some(Tok::Ident(_)) => {
                            let Some(Tok::Ident(n)) = p.bump() else { unreachable!() };
                            binaries.push(n);
                        }
                        _ => return Err(p.err("expected a variable name in Binaries")),
                    }
                }
            }
            Some("general" | "unsupported") => {
                return Err(p.err("unsupported section (only Bounds and Binaries are understood)"))
            }
            _ => return Err(p.err("expected Bounds, Binaries, or End")),
        }
    }

    Ok(ParsedLp { maximize, objective, obj_const, rows, bounds, binaries })
}

/// One Bounds entry: `lo <= x <= hi`, `x <= hi`, `x >= lo`, `x = v`,
/// `x free`, with `-inf`/`infinity` accepted for one-sided forms.
fn parse_bound(p: &mut Parser) -> Result<(String, f64, f64), MilpError> {
    let signed_value = |p: &mut Parser| -> Result<f64, MilpError> {
        let mut sign = 1.0;
        loop {
            match p.peek() {
                Some(Tok::Minus) => {
                    sign = -sign;
                    p.bump();
                }
                Some(Tok::Plus) => {
                    p.bump();
                }
                _ => break,
            }
        }
        match p.bump() {
            Some(Tok::Num(v)) => Ok(sign * v),
            Some(ref t) if keyword(t) == Some("infinity") => Ok(sign * f64::INFINITY),
            _ => Err(p.err("expected a number in Bounds")),
        }
    };

    match p.peek() {
        Some(Tok::Num(_) | Tok::Minus | Tok::Plus) => {
            let lo = signed_value(p)?;
            match p.bump() {
                Some(Tok::Le) => {}
                _ => return Err(p.err("expected <= after a bound value")),
            }
            let name = match p.bump() {
                Some(Tok::Ident(n)) => n,
                _ => return Err(p.err("expected a variable name in Bounds")),
            };
            if let Some(Tok::Le) = p.peek() {
                p.bump();
                let hi = signed_value(p)?;
                Ok((name, lo, hi))
            } else {
                Ok((name, lo, f64::INFINITY))
            }
        }
        Some(Tok::Ident(_)) => {
            let Some(Tok::Ident(name)) = p.bump() else { unreachable!() };
            match p.bump() {
                Some(Tok::Le) => Ok((name, f64::NEG_INFINITY, signed_value(p)?)),
                Some(Tok::Ge) => Ok((name, signed_value(p)?, f64::INFINITY)),
                Some(Tok::Eq) => {
                    let v = signed_value(p)?;
                    Ok((name, v, v))
                }
                Some(ref t) if keyword(t) == Some("free") => {
                    Ok((name, f64::NEG_INFINITY, f64::INFINITY))
                }
                _ => Err(p.err(&format!("bad bound form for {name}"))),
            }
        }
        _ => Err(p.err("expected a bound entry")),
    }
}

/// Variable table in first-appearance order plus the numeric problem.
pub struct NamedProblem {
    pub names: Vec<String>,
    pub problem: LpProblem,
    /// Indices of binary variables, in declaration order.
    pub binaries: Vec<usize>,
}

impl ParsedLp {
    pub fn to_problem(&self) -> Result<NamedProblem, MilpError> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let intern = |names: &mut Vec<String>, index: &mut HashMap<String, usize>, n: &str| {
            *index.entry(n.to_string()).or_insert_with(|| {
                names.push(n.to_string());
                names.len() - 1
            })
        };
        for (n, _) in &self.objective {
            intern(&mut names, &mut index, n);
        }
        for row in &self.rows {
            for (n, _) in &row.terms {
                intern(&mut names, &mut index, n);
            }
        }
        for (n, _, _) in &self.bounds {
            intern(&mut names, &mut index, n);
        }
        for n in &self.binaries {
            intern(&mut names, &mut index, n);
        }

        let nv = names.len();
        let mut lower: Vec<f64> = vec![0.0; nv];
        let mut upper: Vec<f64> = vec![f64::INFINITY; nv];
        let mut explicit = vec![false; nv];
        let binaries: Vec<usize> = self.binaries.iter().map(|n| index[n.as_str()]).collect();
        for &b in &binaries {
            upper[b] = 1.0;
        }
        for (n, lo, hi) in &self.bounds {
            let j = index[n.as_str()];
            if explicit[j] {
                lower[j] = lower[j].max(*lo);
                upper[j] = upper[j].min(*hi);
            } else {
                lower[j] = *lo;
                upper[j] = if self.binaries.iter().any(|b| b == n) {
                    hi.min(1.0)
                } else {
                    *hi
                };
                explicit[j] = true;
            }
        }
        for (j, lo) in lower.iter().enumerate() {
            if !lo.is_finite() {
                return Err(MilpError::LpNumericalFailure(format!(
                    "variable {} has no finite lower bound; this solver needs one",
                    names[j]
                )));
            }
        }

        let mut problem = LpProblem::new(nv, self.maximize);
        problem.obj_const = self.obj_const;
        problem.lower = lower;
        problem.upper = upper;
        problem.objective = self
            .objective
            .iter()
            .map(|(n, c)| (index[n.as_str()], *c))
            .collect();
        for row in &self.rows {
            problem.rows.push(LpRow {
                terms: row.terms.iter().map(|(n, c)| (index[n.as_str()], *c)).collect(),
                op: row.op,
                rhs: row.rhs,
            });
        }
        Ok(NamedProblem { names, problem, binaries })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpFileSolution {
    pub feasible: bool,
    pub objective: f64,
    /// Every variable with its value, in first-appearance order.
    pub values: Vec<(String, f64)>,
    /// Binary assignments enumerated.
    pub combos: u64,
}

/// Solve an LP file exactly by trying every binary assignment; the reference
/// implementation behind the `lp-solve` subcommand.
pub fn solve_lp_text(text: &str, combo_limit: u128) -> Result<LpFileSolution, MilpError> {
    let parsed = parse_lp(text)?;
    let named = parsed.to_problem()?;
    let nb = named.binaries.len();
    if nb >= 64 || (1u128 << nb) > combo_limit {
        return Err(MilpError::ComboLimitExceeded {
            combos: if nb >= 64 { u128::MAX } else { 1u128 << nb },
            limit: combo_limit,
        });
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut combos = 0u64;
    for mask in 0u64..(1u64 << nb) {
        let mut p = named.problem.clone();
        for (bit, &j) in named.binaries.iter().enumerate() {
            let v = ((mask >> bit) & 1) as f64;
            p.lower[j] = v;
            p.upper[j] = v;
        }
        combos += 1;
        let sol = solve_lp(&p)?;
        match sol.status {
            LpStatus::Optimal => {
                let better = match &best {
                    None => true,
                    Some((obj, _)) => {
                        if parsed.maximize {
                            sol.objective > *obj
                        } else {
                            sol.objective < *obj
                        }
                    }
                };
                if better {
                    best = Some((sol.objective, sol.x));
                }
            }
            LpStatus::Infeasible => {}
            LpStatus::Unbounded => {
                return Err(MilpError::LpNumericalFailure("LP is unbounded".into()))
            }
        }
    }

    match best {
        Some((objective, x)) => Ok(LpFileSolution {
            feasible: true,
            objective,
            values: named.names.iter().cloned().zip(x).collect(),
            combos,
        }),
        None => Ok(LpFileSolution {
            feasible: false,
            objective: 0.0,
            values: Vec::new(),
            combos,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lpnum_is_exact_and_plain() {
        assert_eq!(lpnum(0.0), "0");
        assert_eq!(lpnum(-0.0), "0");
        assert_eq!(lpnum(300.0), "300");
        assert_eq!(lpnum(-0.25), "-0.25");
        assert_eq!(lpnum(2.5e-7), "2.5e-7");
        assert_eq!(lpnum(1.5e18), "1.5e18");
        for v in [0.1, 1.0 / 3.0, 6666.666666667, -1.882e-5, 1e6] {
            assert_eq!(lpnum(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn tiny_file_parses_to_the_expected_shape() {
        let text = "\\ comment line\n\
                    Maximize\n obj: x + 2 y\n\
                    Subject To\n c0: x + y <= 4\n c1: x - y >= -1\n c2: 3 x = 2\n\
                    Bounds\n 0 <= x <= 10\n y free\n\
                    End\n";
        let lp = parse_lp(text).unwrap();
        assert!(lp.maximize);
        assert_eq!(lp.objective, vec![("x".into(), 1.0), ("y".into(), 2.0)]);
        assert_eq!(lp.rows.len(), 3);
        assert_eq!(lp.rows[1].op, RowOp::Ge);
        assert_eq!(lp.rows[1].rhs, -1.0);
        assert_eq!(lp.rows[2].terms, vec![("x".into(), 3.0)]);
        assert_eq!(lp.bounds[1], ("y".into(), f64::NEG_INFINITY, f64::INFINITY));
    }

    #[test]
    fn constants_fold_across_the_relation() {
        let lp = parse_lp("Minimize\n x\nSubject To\n c: 2 x + 1 <= x + 5\nBounds\n x >= 0\nEnd\n")
            .unwrap();
        assert_eq!(lp.rows[0].terms, vec![("x".into(), 2.0), ("x".into(), -1.0)]);
        assert_eq!(lp.rows[0].rhs, 4.0);
    }

    #[test]
    fn free_variables_are_rejected_at_solve_time() {
        let text = "Maximize\n x\nSubject To\n c: x <= 1\nBounds\n x free\nEnd\n";
        let err = solve_lp_text(text, 1 << 20).unwrap_err();
        assert!(err.to_string().contains("finite lower bound"), "{err}");
    }

    #[test]
    fn binary_enumeration_picks_the_best_assignment() {
        // max x + 10 z s.t. x + 6 z <= 8, x <= 5: z=1 → 2 + 10 = 12 beats z=0 → 5.
        let text = "Maximize\n obj: x + 10 z\n\
                    Subject To\n c0: x + 6 z <= 8\n\
                    Bounds\n 0 <= x <= 5\n\
                    Binaries\n z\nEnd\n";
        let sol = solve_lp_text(text, 1 << 20).unwrap();
        assert!(sol.feasible);
        assert_eq!(sol.combos, 2);
        assert!((sol.objective - 12.0).abs() < 1e-9, "objective {}", sol.objective);
        let z = sol.values.iter().find(|(n, _)| n == "z").unwrap().1;
        assert!((z - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_files_report_infeasible() {
        let text = "Maximize\n x\nSubject To\n a: x >= 4\n b: x <= 1\nBounds\n 0 <= x <= 9\nEnd\n";
        let sol = solve_lp_text(text, 4).unwrap();
        assert!(!sol.feasible);
    }

    #[test]
    fn combo_limit_is_enforced() {
        let text = "Maximize\n a\nSubject To\n c: a + b + c + d <= 3\nBinaries\n a b c d\nEnd\n";
        match solve_lp_text(text, 8) {
            Err(MilpError::ComboLimitExceeded { combos: 16, limit: 8 }) => {}
            other => panic!("expected combo limit error, got {other:?}"),
        }
    }

    #[test]
    fn unsupported_sections_error_clearly() {
        let text = "Maximize\n x\nSubject To\n c: x <= 1\nGeneral\n x\nEnd\n";
        let err = parse_lp(text).unwrap_err();
        assert!(err.to_string().contains("unsupported section"), "{err}");
    }
}
