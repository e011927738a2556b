//! Q-tropical terms: variables, the constant 0, addition, rational scaling
//! and n-ary min. `max` and subtraction are accepted by the parser as sugar.

mod parser;

use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{BigFloat, LogLinear, Rat};
use crate::error::TropError;

pub use parser::parse;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TropTerm {
    /// 1-based variable index.
    Var(usize),
    Zero,
    Scale(Rat, Box<TropTerm>),
    Add(Box<TropTerm>, Box<TropTerm>),
    /// At least two arguments.
    Min(Vec<TropTerm>),
}

/// Values a term can be evaluated over.
pub trait TropScalar: Clone {
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn scale(&self, q: &Rat) -> Self;
    fn min(&self, o: &Self) -> Self;
}

impl TropScalar for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, q: &Rat) -> Self {
        self * q
    }
    fn min(&self, o: &Self) -> Self {
        if o < self {
            o.clone()
        } else {
            self.clone()
        }
    }
}

impl TropScalar for LogLinear {
    fn zero() -> Self {
        LogLinear::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, q: &Rat) -> Self {
        LogLinear::scale(self, q)
    }
    fn min(&self, o: &Self) -> Self {
        if o < self {
            o.clone()
        } else {
            self.clone()
        }
    }
}

impl TropScalar for BigFloat {
    fn zero() -> Self {
        BigFloat::zero(64)
    }
    fn add(&self, o: &Self) -> Self {
        BigFloat::add(self, o)
    }
    fn scale(&self, q: &Rat) -> Self {
        self.mul_rat(q)
    }
    fn min(&self, o: &Self) -> Self {
        BigFloat::min(self, o)
    }
}

impl TropTerm {
    pub fn var(i: usize) -> Self {
        assert!(i >= 1, "variables are 1-based");
        TropTerm::Var(i)
    }

    pub fn scale(q: Rat, body: TropTerm) -> Self {
        TropTerm::Scale(q, Box::new(body))
    }

    pub fn add(l: TropTerm, r: TropTerm) -> Self {
        TropTerm::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: TropTerm, r: TropTerm) -> Self {
        TropTerm::add(l, TropTerm::scale(-Rat::one(), r))
    }

    pub fn min(args: Vec<TropTerm>) -> Self {
        assert!(args.len() >= 2, "min needs at least two arguments");
        TropTerm::Min(args)
    }

    /// `max(args)` rewritten as `-min(-args)`.
    pub fn max(args: Vec<TropTerm>) -> Self {
        let neg = args.into_iter().map(|a| TropTerm::scale(-Rat::one(), a)).collect();
        TropTerm::scale(-Rat::one(), TropTerm::min(neg))
    }

    /// The height integrand `-1*min(x1,0)`.
    pub fn height() -> Self {
        TropTerm::scale(-Rat::one(), TropTerm::min(vec![TropTerm::Var(1), TropTerm::Zero]))
    }

    /// Largest variable index, 0 if there are none.
    pub fn arity(&self) -> usize {
        match self {
            TropTerm::Var(i) => *i,
            TropTerm::Zero => 0,
            TropTerm::Scale(_, b) => b.arity(),
            TropTerm::Add(l, r) => l.arity().max(r.arity()),
            TropTerm::Min(args) => args.iter().map(TropTerm::arity).max().unwrap_or(0),
        }
    }

    /// Exact evaluation over Q.
    pub fn eval(&self, x: &[Rat]) -> Result<Rat, TropError> {
        self.eval_with(x)
    }

    pub fn eval_with<S: TropScalar>(&self, x: &[S]) -> Result<S, TropError> {
        let needed = self.arity();
        if x.len() < needed {
            return Err(TropError::ArityMismatch { needed, got: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked<S: TropScalar>(&self, x: &[S]) -> S {
        match self {
            TropTerm::Var(i) => x[i - 1].clone(),
            TropTerm::Zero => S::zero(),
            TropTerm::Scale(q, b) => b.eval_unchecked(x).scale(q),
            TropTerm::Add(l, r) => l.eval_unchecked(x).add(&r.eval_unchecked(x)),
            TropTerm::Min(args) => {
                let mut it = args.iter();
                let first = it.next().expect("min has arguments").eval_unchecked(x);
                it.fold(first, |acc, a| acc.min(&a.eval_unchecked(x)))
            }
        }
    }

    /// Rename variable `i` to `sigma(i)`.
    pub fn map_vars(&self, sigma: &impl Fn(usize) -> usize) -> TropTerm {
        match self {
            TropTerm::Var(i) => TropTerm::Var(sigma(*i)),
            TropTerm::Zero => TropTerm::Zero,
            TropTerm::Scale(q, b) => TropTerm::scale(q.clone(), b.map_vars(sigma)),
            TropTerm::Add(l, r) => TropTerm::add(l.map_vars(sigma), r.map_vars(sigma)),
            TropTerm::Min(args) => TropTerm::Min(args.iter().map(|a| a.map_vars(sigma)).collect()),
        }
    }

    /// Shift every variable index up by `k`.
    pub fn shift(&self, k: usize) -> TropTerm {
        self.map_vars(&|i| i + k)
    }

    /// The arguments of `-1*min(-1*a, -1*b, ...)`, the shape `max` parses to.
    fn as_max(&self) -> Option<Vec<&TropTerm>> {
        let TropTerm::Scale(q, body) = self else { return None };
        let TropTerm::Min(args) = &**body else { return None };
        if *q != -Rat::one() {
            return None;
        }
        args.iter()
            .map(|a| match a {
                TropTerm::Scale(r, inner) if *r == -Rat::one() => Some(&**inner),
                _ => None,
            })
            .collect()
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropTerm::Var(_) | TropTerm::Zero | TropTerm::Min(_) => write!(f, "{self}"),
            _ if self.as_max().is_some() => write!(f, "{self}"),
            _ => write!(f, "({self})"),
        }
    }
}

impl fmt::Display for TropTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropTerm::Var(i) => write!(f, "x{i}"),
            TropTerm::Zero => write!(f, "0"),
            TropTerm::Scale(..) if self.as_max().is_some() => {
                write!(f, "max(")?;
                for (i, a) in self.as_max().unwrap_or_default().into_iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            TropTerm::Scale(q, b) => {
                write!(f, "{q}*")?;
                b.fmt_atom(f)
            }
            TropTerm::Add(l, r) => {
                write!(f, "{l} + ")?;
                match **r {
                    TropTerm::Add(..) => write!(f, "({r})"),
                    _ => write!(f, "{r}"),
                }
            }
            TropTerm::Min(args) => {
                write!(f, "min(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for TropTerm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TropTerm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for TropTerm {
    type Err = TropError;
    fn from_str(s: &str) -> Result<Self, TropError> {
        parse(s)
    }
}

/// A random term over `nvars` variables with nesting depth at most `depth`.
/// Scalars are small rationals of either sign.
pub fn random_term<R: Rng + ?Sized>(rng: &mut R, nvars: usize, depth: u32) -> TropTerm {
    assert!(nvars >= 1);
    if depth == 0 || rng.gen_ratio(1, 4) {
        return if rng.gen_ratio(1, 10) { TropTerm::Zero } else { TropTerm::Var(rng.gen_range(1..=nvars)) };
    }
    match rng.gen_range(0..3) {
        0 => {
            let mut q = Rat::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=4).into());
            if q.is_zero() && rng.gen_bool(0.5) {
                q = Rat::one();
            }
            TropTerm::scale(q, random_term(rng, nvars, depth - 1))
        }
        1 => TropTerm::add(random_term(rng, nvars, depth - 1), random_term(rng, nvars, depth - 1)),
        _ => {
            let k = rng.gen_range(2..=3);
            TropTerm::Min((0..k).map(|_| random_term(rng, nvars, depth - 1)).collect())
        }
    }
}

/// Like [`random_term`] but with at least one variable.
pub fn random_nonconstant_term<R: Rng + ?Sized>(rng: &mut R, nvars: usize, depth: u32) -> TropTerm {
    loop {
        let t = random_term(rng, nvars, depth);
        if t.arity() > 0 {
            return t;
        }
    }
}
