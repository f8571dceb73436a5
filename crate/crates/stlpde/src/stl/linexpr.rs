//! Character cursor and linear-expression parsing shared by the two formula
//! syntaxes and the textual region form.
//!
//! Expressions are ordinary arithmetic over the symbols `x` (space
//! coordinate) and `u` (state, written `u`, `u(x)`, or `u(x,t)`), folded
//! symbolically into `u_coef·u + slope·x + intercept`.  Anything nonlinear
//! (`x*x`, division by an expression containing a symbol) is rejected.

use super::StlError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Lin {
    pub u: f64,
    pub x: f64,
    pub c: f64,
}

impl Lin {
    fn constant(c: f64) -> Lin {
        Lin { u: 0.0, x: 0.0, c }
    }

    fn is_constant(&self) -> bool {
        self.u == 0.0 && self.x == 0.0
    }

    fn add(self, o: Lin) -> Lin {
        Lin { u: self.u + o.u, x: self.x + o.x, c: self.c + o.c }
    }

    fn sub(self, o: Lin) -> Lin {
        Lin { u: self.u - o.u, x: self.x - o.x, c: self.c - o.c }
    }

    fn scale(self, k: f64) -> Lin {
        Lin { u: self.u * k, x: self.x * k, c: self.c * k }
    }
}

pub(crate) struct Cursor<'a> {
    s: &'a str,
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(s: &'a str) -> Cursor<'a> {
        Cursor { s, pos: 0 }
    }

    pub fn err(&self, msg: impl Into<String>) -> StlError {
        StlError::syntax(self.pos, msg)
    }

    pub fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    /// Consume `c` (after whitespace) if present.
    pub fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), StlError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    /// Consume a whole identifier if it equals `kw`.
    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let rest = &self.s[self.pos..];
        if rest.starts_with(kw) {
            let after = rest[kw.len()..].chars().next();
            if !matches!(after, Some(c) if c.is_ascii_alphanumeric()) {
                self.pos += kw.len();
                return true;
            }
        }
        false
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.s.len()
    }

    /// `[A-Za-z][A-Za-z0-9]*`
    pub fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => self.bump(),
            _ => return None,
        };
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() {
                self.bump();
            } else {
                break;
            }
        }
        Some(self.s[start..self.pos].to_string())
    }

    /// Signed decimal with optional exponent.  `−` (U+2212) is accepted as a
    /// minus sign.
    pub fn number(&mut self) -> Result<f64, StlError> {
        self.skip_ws();
        let start = self.pos;
        let mut buf = String::new();
        if matches!(self.peek(), Some('-') | Some('+') | Some('−')) {
            let c = self.bump().unwrap();
            buf.push(if c == '−' { '-' } else { c });
        }
        let mut saw_digit = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                saw_digit = true;
                buf.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if self.peek() == Some('.') {
            buf.push('.');
            self.bump();
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() {
                    saw_digit = true;
                    buf.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
        }
        if !saw_digit {
            self.pos = start;
            return Err(StlError::syntax(start, "malformed number"));
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let mark = self.pos;
            let mut exp = String::from("e");
            self.bump();
            if matches!(self.peek(), Some('-') | Some('+') | Some('−')) {
                let c = self.bump().unwrap();
                exp.push(if c == '−' { '-' } else { c });
            }
            let mut exp_digit = false;
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() {
                    exp_digit = true;
                    exp.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            if exp_digit {
                buf.push_str(&exp);
            } else {
                // "1e" followed by something else: leave the 'e' unconsumed.
                self.pos = mark;
            }
        }
        buf.parse()
            .map_err(|_| StlError::syntax(start, "malformed number"))
    }
}

/// Parse an arithmetic expression at the cursor into a [`Lin`].
pub(crate) fn parse_expr(cur: &mut Cursor) -> Result<Lin, StlError> {
    let mut acc = parse_term(cur)?;
    loop {
        cur.skip_ws();
        match cur.peek() {
            Some('+') => {
                cur.bump();
                acc = acc.add(parse_term(cur)?);
            }
            Some('-') | Some('−') => {
                cur.bump();
                acc = acc.sub(parse_term(cur)?);
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_term(cur: &mut Cursor) -> Result<Lin, StlError> {
    let mut acc = parse_factor(cur)?;
    loop {
        cur.skip_ws();
        match cur.peek() {
            Some('*') | Some('·') => {
                cur.bump();
                let rhs = parse_factor(cur)?;
                acc = multiply(cur, acc, rhs)?;
            }
            Some('/') => {
                cur.bump();
                let rhs = parse_factor(cur)?;
                if !rhs.is_constant() {
                    return Err(cur.err("division by a non-constant expression"));
                }
                if rhs.c == 0.0 {
                    return Err(cur.err("division by zero"));
                }
                acc = acc.scale(1.0 / rhs.c);
            }
            _ => return Ok(acc),
        }
    }
}

fn multiply(cur: &Cursor, a: Lin, b: Lin) -> Result<Lin, StlError> {
    if a.is_constant() {
        Ok(b.scale(a.c))
    } else if b.is_constant() {
        Ok(a.scale(b.c))
    } else {
        Err(cur.err("nonlinear product"))
    }
}

fn parse_factor(cur: &mut Cursor) -> Result<Lin, StlError> {
    cur.skip_ws();
    match cur.peek() {
        Some('-') | Some('−') => {
            cur.bump();
            Ok(parse_factor(cur)?.scale(-1.0))
        }
        Some('+') => {
            cur.bump();
            parse_factor(cur)
        }
        _ => parse_primary(cur),
    }
}

fn parse_primary(cur: &mut Cursor) -> Result<Lin, StlError> {
    cur.skip_ws();
    match cur.peek() {
        Some('(') => {
            cur.bump();
            let inner = parse_expr(cur)?;
            cur.expect(')')?;
            Ok(inner)
        }
        Some(c) if c.is_ascii_digit() || c == '.' => {
            let v = cur.number()?;
            Ok(Lin::constant(v))
        }
        Some(c) if c.is_ascii_alphabetic() => {
            let pos = cur.pos;
            let id = cur.ident().unwrap();
            match id.as_str() {
                "x" => Ok(Lin { u: 0.0, x: 1.0, c: 0.0 }),
                "u" => {
                    // Accept u, u(x), u(x,t).
                    if cur.eat('(') {
                        if !cur.eat_keyword("x") {
                            return Err(cur.err("expected 'x' in u(...)"));
                        }
                        if cur.eat(',') && !cur.eat_keyword("t") {
                            return Err(cur.err("expected 't' in u(x,...)"));
                        }
                        cur.expect(')')?;
                    }
                    Ok(Lin { u: 1.0, x: 0.0, c: 0.0 })
                }
                _ => Err(StlError::syntax(pos, format!("unknown symbol '{id}'"))),
            }
        }
        _ => Err(cur.err("expected a number, 'x', 'u', or '('")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(s: &str) -> Lin {
        let mut cur = Cursor::new(s);
        let lin = parse_expr(&mut cur).unwrap();
        assert!(cur.at_end(), "trailing input in {s:?}");
        lin
    }

    #[test]
    fn folds_linear_arithmetic() {
        assert_eq!(eval("1.882e-05 * x + 0.187"), Lin { u: 0.0, x: 1.882e-5, c: 0.187 });
        assert_eq!(eval("x/4 + 303"), Lin { u: 0.0, x: 0.25, c: 303.0 });
        assert_eq!(eval("u(x) - (x/4 + 303)"), Lin { u: 1.0, x: -0.25, c: -303.0 });
        assert_eq!(eval("3.356e-06 * x + -0.510"), Lin { u: 0.0, x: 3.356e-6, c: -0.51 });
        assert_eq!(eval("2 * (x - 1) / 4"), Lin { u: 0.0, x: 0.5, c: -0.5 });
    }

    #[test]
    fn accepts_unicode_operators() {
        assert_eq!(eval("−1.390e-05 · x + 2.844"), Lin { u: 0.0, x: -1.39e-5, c: 2.844 });
        assert_eq!(eval("u(x,t) − 345"), Lin { u: 1.0, x: 0.0, c: -345.0 });
    }

    #[test]
    fn rejects_nonlinear_terms() {
        let mut cur = Cursor::new("x * x");
        assert!(parse_expr(&mut cur).is_err());
        let mut cur = Cursor::new("1 / x");
        assert!(parse_expr(&mut cur).is_err());
        let mut cur = Cursor::new("u * u");
        assert!(parse_expr(&mut cur).is_err());
    }

    #[test]
    fn rejects_unknown_symbols_and_bad_numbers() {
        let mut cur = Cursor::new("y + 1");
        assert!(matches!(parse_expr(&mut cur), Err(StlError::Syntax { .. })));
        let mut cur = Cursor::new("1.2.3");
        let _ = parse_expr(&mut cur);
        assert!(!cur.at_end());
    }
}
