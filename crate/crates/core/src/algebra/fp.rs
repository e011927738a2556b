//! Polynomials over a prime field F_p (p < 2^63) and their factorization:
//! squarefree decomposition, distinct-degree, then Cantor-Zassenhaus
//! equal-degree splitting.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[inline]
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

pub fn invmod(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of zero mod {p}");
    powmod(a, p - 2, p)
}

/// Polynomial over F_p; coefficients in [0, p), lowest degree first, no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    pub fn from_signed(p: u64, coeffs: &[i64]) -> Self {
        let pi = p as i128;
        FpPoly::new(
            p,
            coeffs.iter().map(|&c| (c as i128).rem_euclid(pi) as u64).collect(),
        )
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        FpPoly::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn constant(p: u64, c: u64) -> Self {
        FpPoly::new(p, vec![c])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| addmod(mulmod(acc, x, self.p), c, self.p))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        FpPoly::new(self.p, (0..n).map(|i| addmod(self.coeff(i), o.coeff(i), self.p)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        FpPoly::new(self.p, (0..n).map(|i| submod(self.coeff(i), o.coeff(i), self.p)).collect())
    }

    pub fn neg(&self) -> Self {
        FpPoly::zero(self.p).sub(self)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u128; self.coeffs.len() + o.coeffs.len() - 1];
        let pp = p as u128;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % pp;
            }
        }
        FpPoly::new(p, out.into_iter().map(|c| c as u64).collect())
    }

    pub fn scale(&self, c: u64) -> Self {
        FpPoly::new(self.p, self.coeffs.iter().map(|&a| mulmod(a, c, self.p)).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(invmod(self.leading(), self.p))
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = invmod(d.leading(), p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = mulmod(rem[i], inv, p);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                rem[i - dd + j] = submod(rem[i - dd + j], mulmod(c, dj, p), p);
            }
        }
        rem.truncate(dd);
        (FpPoly::new(p, quot), FpPoly::new(p, rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero());
        q
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.rem(self).is_zero()
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns (g, s, t) with s*self + t*o = g monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (FpPoly::one(p), FpPoly::zero(p));
        let (mut t0, mut t1) = (FpPoly::zero(p), FpPoly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = invmod(r0.leading(), p);
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        FpPoly::new(
            p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mulmod(c, (i as u64) % p, p))
                .collect(),
        )
    }

    pub fn mulmod_poly(&self, o: &Self, m: &Self) -> Self {
        self.mul(o).rem(m)
    }

    /// self^e mod m for an arbitrary-size exponent.
    pub fn powmod_big(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = FpPoly::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod_poly(&acc, m);
            if e.bit(i) {
                acc = acc.mulmod_poly(&base, m);
            }
        }
        acc
    }

    pub fn powmod(&self, e: u64, m: &Self) -> Self {
        self.powmod_big(&BigUint::from(e), m)
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).is_one()
    }

    /// Irreducibility via Rabin's test on the monic part.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let f = self.monic();
        let x = FpPoly::x(self.p);
        let q = BigUint::from(self.p);
        let mut h = x.clone();
        for d in 1..=n / 2 {
            h = h.powmod_big(&q, &f);
            if !h.sub(&x).gcd(&f).is_one() {
                return false;
            }
            let _ = d;
        }
        true
    }

    /// Ordering used for deterministic factor lists: by degree, then
    /// coefficients from the constant term upwards.
    pub fn canonical_cmp(&self, o: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&o.coeffs.len())
            .then_with(|| self.coeffs.cmp(&o.coeffs))
    }

    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        FpPoly::new(
            self.p,
            self.coeffs.iter().step_by(p).copied().collect(),
        )
    }

    fn random_below(&self, degree: usize, rng: &mut ChaCha8Rng) -> Self {
        FpPoly::new(self.p, (0..degree).map(|_| rng.gen_range(0..self.p)).collect())
    }

    /// Factorization into monic irreducibles with multiplicity, sorted by
    /// `canonical_cmp`. The seed drives equal-degree splitting only; the
    /// output does not depend on it.
    pub fn factor(&self, seed: u64) -> Vec<(FpPoly, u32)> {
        assert!(!self.is_zero(), "factorization of the zero polynomial");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<(FpPoly, u32)> = Vec::new();
        for (sqf, mult) in self.monic().squarefree_decomposition() {
            for (g, d) in sqf.distinct_degree() {
                let mut pieces = Vec::new();
                g.equal_degree(d, &mut rng, &mut pieces);
                for piece in pieces {
                    out.push((piece, mult));
                }
            }
        }
        out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        out
    }

    /// Squarefree factors with multiplicities, monic input.
    pub fn squarefree_decomposition(&self) -> Vec<(FpPoly, u32)> {
        let p = self.p;
        let mut result = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return result;
        }
        let mut c = self.gcd(&self.derivative());
        let mut w = self.div_exact(&c);
        let mut i = 1u32;
        while !w.is_one() {
            let y = w.gcd(&c);
            let fac = w.div_exact(&y);
            if fac.degree().unwrap_or(0) > 0 {
                result.push((fac, i));
            }
            w = y;
            c = c.div_exact(&w);
            i += 1;
        }
        if c.degree().unwrap_or(0) > 0 {
            let root = c.pth_root();
            for (g, m) in root.squarefree_decomposition() {
                match result.iter_mut().find(|(h, _)| *h == g) {
                    Some(entry) => entry.1 += m * p as u32,
                    None => result.push((g, m * p as u32)),
                }
            }
        }
        result
    }

    /// Splits a squarefree monic polynomial into products of irreducibles of
    /// equal degree, returned as (product, degree).
    pub fn distinct_degree(&self) -> Vec<(FpPoly, usize)> {
        let p = self.p;
        let mut out = Vec::new();
        let mut f = self.clone();
        let x = FpPoly::x(p);
        let mut h = x.clone();
        let q = BigUint::from(p);
        let mut d = 1usize;
        while f.degree().unwrap_or(0) >= 2 * d {
            h = h.powmod_big(&q, &f);
            let g = h.sub(&x).gcd(&f);
            if !g.is_one() {
                f = f.div_exact(&g);
                h = h.rem(&f);
                out.push((g, d));
            }
            d += 1;
        }
        if let Some(n) = f.degree() {
            if n > 0 {
                out.push((f, n));
            }
        }
        out
    }

    fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
        let n = self.degree().unwrap_or(0);
        if n == 0 {
            return;
        }
        if n == d {
            out.push(self.clone());
            return;
        }
        let p = self.p;
        loop {
            let a = self.random_below(n, rng);
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let b = if p == 2 {
                // trace map a + a^2 + ... + a^(2^(d-1))
                let mut t = a.rem(self);
                let mut acc = t.clone();
                for _ in 1..d {
                    t = t.mulmod_poly(&t, self);
                    acc = acc.add(&t);
                }
                acc
            } else {
                let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1u32;
                a.powmod_big(&e, self).sub(&FpPoly::one(p))
            };
            let g = b.gcd(self);
            if let Some(gd) = g.degree() {
                if gd > 0 && gd < n {
                    let other = self.div_exact(&g);
                    g.equal_degree(d, rng, out);
                    other.equal_degree(d, rng, out);
                    return;
                }
            }
        }
    }
}

/// Factor a nonzero polynomial over F_p into monic irreducibles.
pub fn factor_poly_fp(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    f.factor(0)
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_with_var(self, "x", f)
    }
}

pub(crate) fn fmt_with_var(poly: &FpPoly, var: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if poly.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, &c) in poly.coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        if !first {
            write!(f, "+")?;
        }
        first = false;
        match (i, c) {
            (0, _) => write!(f, "{c}")?,
            (1, 1) => write!(f, "{var}")?,
            (1, _) => write!(f, "{c}*{var}")?,
            (_, 1) => write!(f, "{var}^{i}")?,
            _ => write!(f, "{c}*{var}^{i}")?,
        }
    }
    Ok(())
}

impl FpPoly {
    /// Render with a chosen variable name, e.g. `t^2+t`.
    pub fn display_with(&self, var: &str) -> String {
        struct W<'a>(&'a FpPoly, &'a str);
        impl fmt::Display for W<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt_with_var(self.0, self.1, f)
            }
        }
        W(self, var).to_string()
    }
}
