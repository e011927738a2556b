//! Exact values of the form `q0 + sum_p c_p log p` with rational coefficients
//! and primes `p`.
//!
//! Since 1 and the logarithms of distinct primes are linearly independent
//! over Q, such a value is zero exactly when all coefficients vanish, and the
//! sign of a nonzero value is decided by evaluating at increasing precision.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bigfloat::{ln_integer, BigFloat};
use super::integer::factor_int;
use super::{parse_rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LogLinear {
    rational: Rat,
    logs: BTreeMap<BigUint, Rat>,
}

impl LogLinear {
    pub fn zero() -> Self {
        LogLinear { rational: Rat::zero(), logs: BTreeMap::new() }
    }

    pub fn from_rat(q: Rat) -> Self {
        LogLinear { rational: q, logs: BTreeMap::new() }
    }

    /// `c * log p` for a prime `p`.
    pub fn log_prime(p: BigUint, c: Rat) -> Self {
        let mut logs = BTreeMap::new();
        if !c.is_zero() {
            logs.insert(p, c);
        }
        LogLinear { rational: Rat::zero(), logs }
    }

    /// `log |q|` for a nonzero rational, expanded over primes.
    pub fn log_abs(q: &Rat) -> Self {
        assert!(!q.is_zero(), "log of zero");
        let mut out = LogLinear::zero();
        for (p, e) in factor_abs(q.numer()) {
            out.add_log(&p, &Rat::from_integer(BigInt::from(e)));
        }
        for (p, e) in factor_abs(q.denom()) {
            out.add_log(&p, &-Rat::from_integer(BigInt::from(e)));
        }
        out
    }

    fn add_log(&mut self, p: &BigUint, c: &Rat) {
        let entry = self.logs.entry(p.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.logs.remove(p);
        }
    }

    pub fn rational(&self) -> &Rat {
        &self.rational
    }

    pub fn logs(&self) -> &BTreeMap<BigUint, Rat> {
        &self.logs
    }

    pub fn coeff(&self, p: &BigUint) -> Rat {
        self.logs.get(p).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.logs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.logs.is_empty()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return LogLinear::zero();
        }
        LogLinear {
            rational: &self.rational * c,
            logs: self.logs.iter().map(|(p, a)| (p.clone(), a * c)).collect(),
        }
    }

    /// Enclosure at the given precision.
    pub fn to_ball(&self, prec: u32) -> BigFloat {
        let mut acc = BigFloat::from_rat(&self.rational, prec);
        for (p, c) in &self.logs {
            acc = acc.add(&ln_integer(p, prec).mul_rat(c));
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.to_ball(80).to_f64()
    }

    /// Sign of the value, decided exactly.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if self.is_rational() {
            return self.rational.cmp(&Rat::zero());
        }
        let mut prec = 64;
        loop {
            let b = self.to_ball(prec);
            if b.is_positive() {
                return Ordering::Greater;
            }
            if b.is_negative() {
                return Ordering::Less;
            }
            prec *= 2;
        }
    }

    /// Parse the rendering produced by `Display`, e.g. `1/2 + 2*log(2) - log(3)`.
    /// `log` accepts any positive rational argument.
    pub fn parse(text: &str) -> Option<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return None;
        }
        let mut out = LogLinear::zero();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = Rat::one();
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
            } else if i > 0 {
                return None;
            }
            let start = i;
            let mut depth = 0;
            while i < bytes.len() {
                match bytes[i] {
                    b'(' => depth += 1,
                    b')' => depth -= 1,
                    b'+' | b'-' if depth == 0 && i > start && bytes[i - 1] != b'/' => break,
                    _ => {}
                }
                i += 1;
            }
            let term = &s[start..i];
            let (coeff, log_arg) = match term.find("log(") {
                Some(pos) => {
                    let coeff = if pos == 0 {
                        Rat::one()
                    } else {
                        parse_rat(term[..pos].strip_suffix('*')?)?
                    };
                    let arg = term[pos + 4..].strip_suffix(')')?;
                    (coeff, Some(parse_rat(arg)?))
                }
                None => (parse_rat(term)?, None),
            };
            let coeff = coeff * &sign;
            match log_arg {
                Some(a) if a.is_positive() => out = out + LogLinear::log_abs(&a).scale(&coeff),
                Some(_) => return None,
                None => out.rational += coeff,
            }
        }
        Some(out)
    }
}

fn factor_abs(n: &BigInt) -> Vec<(BigUint, u32)> {
    if n.abs().is_one() {
        Vec::new()
    } else {
        factor_int(n)
    }
}

impl Add for LogLinear {
    type Output = LogLinear;
    fn add(mut self, o: LogLinear) -> LogLinear {
        self.rational += &o.rational;
        for (p, c) in &o.logs {
            self.add_log(p, c);
        }
        self
    }
}

impl Add for &LogLinear {
    type Output = LogLinear;
    fn add(self, o: &LogLinear) -> LogLinear {
        self.clone() + o.clone()
    }
}

impl Neg for LogLinear {
    type Output = LogLinear;
    fn neg(self) -> LogLinear {
        self.scale(&-Rat::one())
    }
}

impl Sub for LogLinear {
    type Output = LogLinear;
    fn sub(self, o: LogLinear) -> LogLinear {
        self + (-o)
    }
}

impl Sub for &LogLinear {
    type Output = LogLinear;
    fn sub(self, o: &LogLinear) -> LogLinear {
        self.clone() - o.clone()
    }
}

impl PartialOrd for LogLinear {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for LogLinear {
    fn cmp(&self, o: &Self) -> Ordering {
        (self - o).signum()
    }
}

fn fmt_coeff(c: &Rat) -> String {
    if c.is_one() {
        String::new()
    } else {
        format!("{c}*")
    }
}

impl fmt::Display for LogLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.rational.is_zero() {
            write!(f, "{}", self.rational)?;
            first = false;
        }
        for (p, c) in &self.logs {
            let term = format!("{}log({p})", fmt_coeff(&c.abs()));
            match (first, c.is_negative()) {
                (true, false) => write!(f, "{term}")?,
                (true, true) => write!(f, "-{term}")?,
                (false, false) => write!(f, " + {term}")?,
                (false, true) => write!(f, " - {term}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for LogLinear {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LogLinear {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        LogLinear::parse(&text).ok_or_else(|| serde::de::Error::custom(format!("bad log-linear value: {text}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use proptest::prelude::*;

    #[test]
    fn log_of_rational_expands() {
        let v = LogLinear::log_abs(&rat(-12, 35));
        assert_eq!(v.to_string(), "2*log(2) + log(3) - log(5) - log(7)");
        assert_eq!(LogLinear::parse(&v.to_string()), Some(v));
        assert!(LogLinear::log_abs(&rat(1, 1)).is_zero());
    }

    #[test]
    fn exact_sign() {
        // log 2 > 2/3 and 3 log 2 < log 9
        let a = LogLinear::log_prime(BigUint::from(2u32), rat(1, 1)) - LogLinear::from_rat(rat(2, 3));
        assert_eq!(a.signum(), Ordering::Greater);
        let b = LogLinear::log_abs(&rat(8, 9));
        assert_eq!(b.signum(), Ordering::Less);
        // 2^10 vs 10^3: 10 log 2 - 3 log 10 > 0
        let c = LogLinear::log_abs(&rat(1024, 1000));
        assert_eq!(c.signum(), Ordering::Greater);
    }

    #[test]
    fn parse_forms() {
        let v = LogLinear::parse("1/2 + 3/2*log(5) - log(2)").unwrap();
        assert_eq!(v.rational(), &rat(1, 2));
        assert_eq!(v.coeff(&BigUint::from(5u32)), rat(3, 2));
        assert_eq!(v.to_string(), "1/2 - log(2) + 3/2*log(5)");
        assert_eq!(LogLinear::parse("log(6)").unwrap(), LogLinear::log_abs(&rat(6, 1)));
        assert_eq!(LogLinear::parse("-1/3").unwrap(), LogLinear::from_rat(rat(-1, 3)));
        assert!(LogLinear::parse("log(-2)").is_none());
    }

    proptest! {
        #[test]
        fn ball_matches_f64(n in 1i64..100_000, d in 1i64..100_000, q in -50i64..50) {
            let v = LogLinear::log_abs(&rat(n, d)) + LogLinear::from_rat(rat(q, 7));
            let expect = (n as f64 / d as f64).ln() + q as f64 / 7.0;
            prop_assert!((v.to_f64() - expect).abs() < 1e-9);
            prop_assert_eq!(LogLinear::parse(&v.to_string()), Some(v));
        }
    }
}
