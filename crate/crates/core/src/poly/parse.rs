//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar:
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := atom ("^" nonneg_int)?
//! atom     := number | variable | "(" expr ")" | "-" atom
//! variable := "x" positive_int
//! number   := decimal literal with optional exponent
//! ```
//! Whitespace is allowed between tokens. Note that per this grammar a power
//! binds to the whole atom, so `-x1^2` is `(-x1)^2`.

use super::Polynomial;
use crate::error::{Error, Result};

const MAX_EXPONENT: u32 = 512;

/// Parse `text` as a polynomial in variables `x1..x{dim}`.
pub fn parse(text: &str, dim: usize) -> Result<Polynomial> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, dim };
    p.skip_ws();
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> Error {
        Error::Parse { position: self.pos, message: message.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat(b'-') {
                acc = acc.subtract(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = acc.multiply(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.nonneg_int()?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.skip_ws();
                Ok(self.atom()?.scale(-1.0))
            }
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(b'x') => self.variable(),
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(_) => Err(self.err("expected number, variable, '(' or '-'")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn variable(&mut self) -> Result<Polynomial> {
        let start = self.pos;
        self.pos += 1; // consume 'x'
        let idx_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == idx_start {
            self.pos = start;
            return Err(self.err("expected variable index after 'x'"));
        }
        let digits = std::str::from_utf8(&self.bytes[idx_start..self.pos]).unwrap();
        let index: usize = digits
            .parse()
            .map_err(|_| Error::Parse { position: idx_start, message: "variable index too large".into() })?;
        if index == 0 {
            return Err(Error::Parse { position: idx_start, message: "variable indices start at x1".into() });
        }
        if index > self.dim {
            return Err(Error::VariableOutOfRange { index, dim: self.dim, position: start });
        }
        self.skip_ws();
        Ok(Polynomial::variable(self.dim, index - 1))
    }

    fn number(&mut self) -> Result<Polynomial> {
        let start = self.pos;
        let mut saw_digit = false;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
            saw_digit = true;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
                saw_digit = true;
            }
        }
        if !saw_digit {
            self.pos = start;
            return Err(self.err("expected a number"));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == exp_start {
                return Err(self.err("expected digits in exponent"));
            }
        }
        let lit = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let value: f64 = lit
            .parse()
            .map_err(|_| Error::Parse { position: start, message: format!("invalid number literal '{lit}'") })?;
        self.skip_ws();
        Ok(Polynomial::constant(self.dim, value))
    }

    fn nonneg_int(&mut self) -> Result<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a non-negative integer exponent"));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let k: u32 = digits
            .parse()
            .map_err(|_| Error::Parse { position: start, message: "exponent too large".into() })?;
        if k > MAX_EXPONENT {
            return Err(Error::Parse { position: start, message: format!("exponent {k} exceeds limit {MAX_EXPONENT}") });
        }
        self.skip_ws();
        Ok(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn reads_monomials_and_constants() {
        let p = parse("x1^2*x2 - 3", 2).unwrap();
        assert_eq!(p.coefficient(&[2, 1]), 1.0);
        assert_eq!(p.coefficient(&[0, 0]), -3.0);
        assert_eq!(p.degree(), 3);
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn zero_literal_is_zero_polynomial() {
        let p = parse("0", 3).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn expands_parenthesized_power() {
        // Brute-force oracle: convolve dense coefficient grids.
        let p = parse("(x1+x2)^2", 2).unwrap();
        let a = [[0.0, 1.0], [1.0, 0.0]]; // x2 + x1 as dense [i][j] ~ x1^i x2^j
        let mut dense = [[0.0f64; 3]; 3];
        for i1 in 0..2 {
            for j1 in 0..2 {
                for i2 in 0..2 {
                    for j2 in 0..2 {
                        dense[i1 + i2][j1 + j2] += a[i1][j1] * a[i2][j2];
                    }
                }
            }
        }
        for (i, row) in dense.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                assert_eq!(p.coefficient(&[i as u32, j as u32]), c, "x1^{i} x2^{j}");
            }
        }
    }

    #[test]
    fn respects_grammar_precedence() {
        let p = parse("1 + 2*x1^2", 1).unwrap();
        assert_eq!(p.coefficient(&[0]), 1.0);
        assert_eq!(p.coefficient(&[2]), 2.0);
        // Power binds to the atom, so -x1^2 is (-x1)^2.
        let q = parse("-x1^2", 1).unwrap();
        assert_eq!(q.coefficient(&[2]), 1.0);
    }

    #[test]
    fn number_forms() {
        assert_eq!(parse("2.5e-1", 1).unwrap().coefficient(&[0]), 0.25);
        assert_eq!(parse(".5", 1).unwrap().coefficient(&[0]), 0.5);
        assert_eq!(parse("3.", 1).unwrap().coefficient(&[0]), 3.0);
        assert_eq!(parse("1E2", 1).unwrap().coefficient(&[0]), 100.0);
    }

    #[test]
    fn syntax_error_carries_position() {
        match parse("x1 + * x2", 2) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse("x1 +", 2).is_err());
        assert!(parse("(x1", 2).is_err());
        assert!(parse("x1 2", 2).is_err());
        assert!(parse("2e", 1).is_err());
        assert!(parse("x1^-2", 1).is_err());
    }

    #[test]
    fn variable_out_of_range() {
        match parse("x3 + 1", 2) {
            Err(Error::VariableOutOfRange { index, dim, .. }) => {
                assert_eq!((index, dim), (3, 2));
            }
            other => panic!("expected out-of-range error, got {other:?}"),
        }
        assert!(parse("x0", 2).is_err());
    }

    #[test]
    fn cancellation_is_canonicalized() {
        let p = parse("x1 - x1 + 2", 1).unwrap();
        assert!(p.is_constant());
        assert_eq!(p.num_terms(), 1);
    }
}
