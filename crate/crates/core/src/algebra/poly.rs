//! Dense univariate polynomials over a commutative ring, lowest degree first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Num, One, Signed, Zero};

use super::{common_denominator, Rat};

/// Invariant: `coeffs` is empty (the zero polynomial) or ends in a nonzero
/// coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Clone + Num> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    pub fn monomial(c: T, degree: usize) -> Self {
        let mut coeffs = vec![T::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = T::zero();
        for c in self.coeffs.iter() {
            out.push(c.clone() * k.clone());
            k = k + T::one();
        }
        if !out.is_empty() {
            out.remove(0);
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn map<U: Clone + Num>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Division by a monic divisor; valid over any ring.
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.degree().expect("monic divisor is nonzero");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i].clone();
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c.clone();
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = rem[i - dd + j].clone() - c.clone() * d.clone();
            }
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem_monic(&self, divisor: &Self) -> Self {
        self.div_rem_monic(divisor).1
    }
}

impl<T: Clone + Num> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Clone + Num> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Clone + Num> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Clone + Num + Neg<Output = T>> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl Poly<Rat> {
    /// Euclidean division over Q.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let lc = divisor.leading().expect("division by the zero polynomial").clone();
        let monic = divisor.scale(&lc.recip());
        let (q, r) = self.div_rem_monic(&monic);
        (q.scale(&lc.recip()), r)
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns (g, s, t) with s*self + t*other = g, g monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading().cloned() {
            Some(lc) => {
                let inv = lc.recip();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
            None => (r0, s0, t0),
        }
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Clear denominators: returns (g, den) with self = g / den, g integral.
    pub fn to_integral(&self) -> (Poly<BigInt>, BigInt) {
        let den = common_denominator(self.coeffs.iter());
        let g = self.map(|c| (c * Rat::from_integer(den.clone())).to_integer());
        (g, den)
    }

    /// Rational roots, found among ±(divisors of the constant term) after
    /// clearing denominators.
    pub fn rational_roots(&self) -> Vec<Rat> {
        let (g, _) = self.to_integral();
        let mut roots = Vec::new();
        let mut g = g;
        // strip x factors
        let mut shift = 0;
        while !g.is_zero() && g.coeff(0).is_zero() {
            g = Poly::new(g.coeffs()[1..].to_vec());
            shift += 1;
        }
        if shift > 0 {
            roots.push(Rat::zero());
        }
        let Some(deg) = g.degree() else { return roots };
        if deg == 0 {
            return roots;
        }
        let a0 = g.coeff(0);
        let an = g.leading().unwrap().clone();
        let divisors = |n: &BigInt| -> Vec<BigInt> {
            super::integer::factor_int(n)
                .into_iter()
                .fold(vec![BigInt::one()], |acc, (p, k)| {
                    let p = BigInt::from(p);
                    let mut next = Vec::new();
                    for d in acc {
                        let mut pk = BigInt::one();
                        for _ in 0..=k {
                            next.push(&d * &pk);
                            pk *= &p;
                        }
                    }
                    next
                })
        };
        let gq = g.map(|c| Rat::from_integer(c.clone()));
        for num in divisors(&a0) {
            for den in divisors(&an) {
                for sign in [1, -1] {
                    let r = Rat::new(&num * sign, den.clone());
                    if gq.eval(&r).is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

impl Poly<BigInt> {
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn to_rat(&self) -> Poly<Rat> {
        self.map(|c| Rat::from_integer(c.clone()))
    }

    /// Coefficients reduced into [0, m).
    pub fn reduce_mod(&self, m: &BigInt) -> Self {
        self.map(|c| c.mod_floor(m))
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl<T: Clone + Num + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c.is_one()) {
                (0, _) => write!(f, "{c}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "({c})*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "({c})*x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn zp(c: &[i64]) -> Poly<BigInt> {
        Poly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    fn qp(c: &[i64]) -> Poly<Rat> {
        Poly::new(c.iter().map(|&x| rat(x, 1)).collect())
    }

    #[test]
    fn trims_and_degree() {
        assert_eq!(zp(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(zp(&[0, 0]).is_zero());
        assert_eq!(zp(&[]).degree(), None);
    }

    #[test]
    fn monic_division() {
        let f = zp(&[-2, 0, 1]);
        let (q, r) = zp(&[1, 1, 1, 1]).div_rem_monic(&f);
        // x^3 + x^2 + x + 1 = (x + 1)(x^2 - 2) + 3x + 3
        assert_eq!(q, zp(&[1, 1]));
        assert_eq!(r, zp(&[3, 3]));
    }

    #[test]
    fn ext_gcd_inverts_mod_minpoly() {
        let f = qp(&[-2, 0, 1]);
        let g = qp(&[1, 1]);
        let (d, s, _) = g.ext_gcd(&f);
        assert_eq!(d, Poly::one());
        let check = (&s * &g).div_rem(&f).1;
        assert_eq!(check, Poly::one());
    }

    #[test]
    fn rational_roots_found() {
        let f = qp(&[-6, 1, 1]); // (x+3)(x-2)
        assert_eq!(f.rational_roots(), vec![rat(-3, 1), rat(2, 1)]);
        assert!(qp(&[-2, 0, 1]).rational_roots().is_empty());
        let h = Poly::new(vec![rat(-1, 1), rat(0, 1), rat(4, 1)]); // 4x^2 - 1
        assert_eq!(h.rational_roots(), vec![rat(-1, 2), rat(1, 2)]);
    }

    #[test]
    fn derivative_and_eval() {
        let f = zp(&[1, 2, 3]);
        assert_eq!(f.derivative(), zp(&[2, 6]));
        assert_eq!(f.eval(&BigInt::from(2)), BigInt::from(17));
        assert!(qp(&[-2, 0, 1]).is_squarefree());
        assert!(!qp(&[1, 2, 1]).is_squarefree());
    }
}
