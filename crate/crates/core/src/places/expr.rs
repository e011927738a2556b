//! Rational expressions in named variables, evaluated inside a carrier.
//!
//! ```text
//! expr    := ['-'] product (('+'|'-') product)*
//! product := power (('*'|'/') power)*
//! power   := unary ('^' ['-'] digits)?
//! unary   := '-' unary | primary
//! primary := number | ident | 'sqrt' '(' ['-'] digits ')' | '(' expr ')'
//! ```
//! Numbers are integers, fractions written with `/`, or decimals.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use super::carrier::{Carrier, FieldElem};
use crate::algebra::{parse_rat, Rat};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Rat),
    Var(String),
    /// sqrt(d); only meaningful in the quadratic field with that d.
    Sqrt(BigInt),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)
    }
}

pub fn parse_expr(text: &str) -> std::result::Result<Expr, ExprError> {
    let mut p = P { s: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct P<'a> {
    s: &'a [u8],
    pos: usize,
}

impl P<'_> {
    fn err(&self, m: &str) -> ExprError {
        ExprError { offset: self.pos, message: m.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> std::result::Result<Expr, ExprError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> std::result::Result<Expr, ExprError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = Expr::Mul(Box::new(acc), Box::new(self.power()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = Expr::Div(Box::new(acc), Box::new(self.power()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> std::result::Result<Expr, ExprError> {
        let base = self.unary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.ws();
            let neg = self.s.get(self.pos) == Some(&b'-');
            if neg {
                self.pos += 1;
            }
            let digits = self.digits()?;
            let e: i64 = digits.parse().map_err(|_| self.err("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn unary(&mut self) -> std::result::Result<Expr, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn digits(&mut self) -> std::result::Result<String, ExprError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn primary(&mut self) -> std::result::Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'.') {
                    self.pos += 1;
                }
                let text = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
                let q = parse_rat(&text).ok_or(ExprError { offset: start, message: "bad number".into() })?;
                Ok(Expr::Num(q))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
                if name == "sqrt" && self.peek() == Some(b'(') {
                    self.pos += 1;
                    self.ws();
                    let neg = self.s.get(self.pos) == Some(&b'-');
                    if neg {
                        self.pos += 1;
                    }
                    let d: BigInt = self.digits()?.parse().expect("digits");
                    if self.peek() != Some(b')') {
                        return Err(self.err("expected ')'"));
                    }
                    self.pos += 1;
                    return Ok(Expr::Sqrt(if neg { -d } else { d }));
                }
                Ok(Expr::Var(name))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

impl Expr {
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Num(_) | Expr::Sqrt(_) => {}
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Evaluate in `carrier`; `env` supplies variable values. Division by
    /// zero yields `Error::ZeroElement`.
    pub fn eval(&self, carrier: &Carrier, env: &dyn Fn(&str) -> Option<FieldElem>) -> Result<FieldElem> {
        match self {
            Expr::Num(q) => carrier.from_rat(q.clone()),
            Expr::Var(v) => env(v).ok_or_else(|| Error::InvalidElement(format!("unknown variable {v}"))),
            Expr::Sqrt(d) => {
                if carrier.quadratic_d() == Some(d) {
                    carrier.generator()
                } else {
                    Err(Error::InvalidElement(format!("sqrt({d}) is not the generator of {carrier}")))
                }
            }
            Expr::Neg(a) => carrier.neg(&a.eval(carrier, env)?),
            Expr::Add(a, b) => carrier.add(&a.eval(carrier, env)?, &b.eval(carrier, env)?),
            Expr::Sub(a, b) => carrier.sub(&a.eval(carrier, env)?, &b.eval(carrier, env)?),
            Expr::Mul(a, b) => carrier.mul(&a.eval(carrier, env)?, &b.eval(carrier, env)?),
            Expr::Div(a, b) => carrier.div(&a.eval(carrier, env)?, &b.eval(carrier, env)?),
            Expr::Pow(a, e) => carrier.pow(&a.eval(carrier, env)?, *e),
        }
    }
}

/// Parse an element written in terms of the carrier generator: `t` for
/// F_p(t), `alpha` (or `sqrt(d)` for quadratic fields) for number fields.
pub fn parse_element(carrier: &Carrier, text: &str) -> Result<FieldElem> {
    let e = parse_expr(text).map_err(|e| Error::InvalidElement(format!("{text}: {e}")))?;
    let gen = match carrier {
        Carrier::Rationals => None,
        Carrier::FunctionField(_) => Some("t"),
        _ => Some("alpha"),
    };
    e.eval(carrier, &|name| {
        if Some(name) == gen {
            carrier.generator().ok()
        } else {
            None
        }
    })
}
