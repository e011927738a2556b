//! Recursive descent parser for the surface syntax of tropical terms.
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := (rational '*')? atom
//! atom     := var | '0' | ('min'|'max') '(' expr (',' expr)+ ')' | '(' expr ')'
//! var      := 'x' [1-9][0-9]*
//! rational := '-'? digits ('/' digits)?
//! ```
//! Whitespace may appear between tokens.

use num_bigint::BigInt;
use num_traits::Zero;

use super::TropTerm;
use crate::algebra::Rat;
use crate::error::TropError;

pub fn parse(text: &str) -> Result<TropTerm, TropError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let t = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> TropError {
        TropError::SyntaxError { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), TropError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<TropTerm, TropError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let r = self.term()?;
                    acc = TropTerm::add(acc, r);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let r = self.term()?;
                    acc = TropTerm::sub(acc, r);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<TropTerm, TropError> {
        match self.peek() {
            Some(c) if c == b'-' || c.is_ascii_digit() => {
                let start = self.pos;
                let q = self.rational()?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    let body = self.atom()?;
                    Ok(TropTerm::scale(q, body))
                } else if q.is_zero() {
                    Ok(TropTerm::Zero)
                } else {
                    Err(TropError::ConstantError { offset: start })
                }
            }
            _ => self.atom(),
        }
    }

    fn digits(&mut self) -> Result<BigInt, TropError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn rational(&mut self) -> Result<Rat, TropError> {
        self.skip_ws();
        let neg = if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let num = self.digits()?;
        let den = if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let d = self.digits()?;
            if d.is_zero() {
                return Err(self.error("zero denominator"));
            }
            d
        } else {
            BigInt::from(1)
        };
        let q = Rat::new(num, den);
        Ok(if neg { -q } else { q })
    }

    fn keyword(&mut self, word: &str) -> bool {
        let w = word.as_bytes();
        if self.src[self.pos..].starts_with(w) {
            let after = self.src.get(self.pos + w.len()).copied();
            if !after.is_some_and(|c| c.is_ascii_alphanumeric()) {
                self.pos += w.len();
                return true;
            }
        }
        false
    }

    fn atom(&mut self) -> Result<TropTerm, TropError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                if self.src.get(self.pos) == Some(&b'0') {
                    return Err(self.error("variable index must start with 1-9"));
                }
                let idx = self.digits()?;
                let idx: usize =
                    idx.try_into().map_err(|_| TropError::SyntaxError {
                        offset: start,
                        message: "variable index too large".to_string(),
                    })?;
                Ok(TropTerm::Var(idx))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => {
                let start = self.pos;
                let q = self.rational()?;
                if q.is_zero() {
                    Ok(TropTerm::Zero)
                } else {
                    Err(TropError::ConstantError { offset: start })
                }
            }
            Some(b'm') => {
                let is_min = if self.keyword("min") {
                    true
                } else if self.keyword("max") {
                    false
                } else {
                    return Err(self.error("expected min or max"));
                };
                self.expect(b'(')?;
                let mut args = vec![self.expr()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                if args.len() < 2 {
                    return Err(self.error("min/max need at least two arguments"));
                }
                self.expect(b')')?;
                Ok(if is_min { TropTerm::min(args) } else { TropTerm::max(args) })
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
