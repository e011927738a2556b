//! Local computations at a prime: square roots modulo prime powers and the
//! finite valuations of quadratic and general number field elements.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::algebra::{hensel_lift, resultant, FpPoly, Poly};
use crate::error::{Error, Result};

pub(crate) fn big(p: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, p.clone())
}

/// v_p(x), or `None` for x = 0.
pub(crate) fn v_p(x: &BigInt, p: &BigInt) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let mut x = x.clone();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return Some(k);
        }
        x = q;
        k += 1;
    }
}

fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// Legendre symbol (d / p) for an odd prime p.
pub(crate) fn legendre(d: &BigInt, p: &BigInt) -> i32 {
    let a = d.mod_floor(p);
    if a.is_zero() {
        return 0;
    }
    let e = (p - 1u32) >> 1;
    if a.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// A square root of a quadratic residue d modulo an odd prime p
/// (Tonelli-Shanks), normalized to the smaller of the two roots.
pub(crate) fn sqrt_mod_prime(d: &BigInt, p: &BigInt) -> BigInt {
    let a = d.mod_floor(p);
    if a.is_zero() {
        return a;
    }
    let one = BigInt::one();
    let mut q = p - &one;
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let mut z = BigInt::from(2);
    while legendre(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2).mod_floor(p);
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1) as usize), p);
        m = i;
        c = (&b * &b).mod_floor(p);
        t = (&t * &c).mod_floor(p);
        r = (&r * &b).mod_floor(p);
    }
    let other = p - &r;
    r.min(other)
}

/// Lift a root r0 of x^2 = d mod p (p odd, p not dividing d) to p^n.
pub(crate) fn lift_sqrt_odd(d: &BigInt, r0: &BigInt, p: &BigInt, n: u32) -> BigInt {
    let mut r = r0.clone();
    let mut k = 1u32;
    while k < n {
        k = (2 * k).min(n);
        let m = num_traits::pow(p.clone(), k as usize);
        let fx = (&r * &r - d).mod_floor(&m);
        let inv = modinv(&(&r << 1), &m);
        r = (&r - fx * inv).mod_floor(&m);
    }
    r
}

/// The 2-adic square root of d (d = 1 mod 8) modulo 2^n that is congruent
/// to `residue` (1 or 3) mod 4.
pub(crate) fn lift_sqrt_two(d: &BigInt, residue: u32, n: u32) -> BigInt {
    let mut r = BigInt::one();
    let mut k = 3u32;
    while k < n + 1 {
        let m = BigInt::one() << (k + 1) as usize;
        if !(&r * &r - d).mod_floor(&m).is_zero() {
            r += BigInt::one() << (k - 1) as usize;
        }
        k += 1;
    }
    let m = BigInt::one() << n.max(2) as usize;
    r = r.mod_floor(&m);
    if (&r % 4u32) != BigInt::from(residue) {
        r = (&m - &r).mod_floor(&m);
    }
    r
}

/// v_P(A + B sqrt d) at a split prime, where the place corresponds to the
/// p-adic root `root(N)` of d modulo p^N.
pub(crate) fn split_valuation(a: &BigInt, b: &BigInt, p: &BigInt, root: impl Fn(u32) -> BigInt) -> u64 {
    debug_assert!(!(a.is_zero() && b.is_zero()));
    let mut n = 32u32;
    loop {
        let m = num_traits::pow(p.clone(), n as usize);
        let x = (a + b * root(n)).mod_floor(&m);
        if let Some(v) = v_p(&x, p) {
            if v < u64::from(n / 2) {
                return v;
            }
        }
        n *= 2;
    }
}

/// v_P(A + B sqrt d) for odd p dividing d: min(2 v_p(A), 1 + 2 v_p(B)).
pub(crate) fn ramified_odd_valuation(a: &BigInt, b: &BigInt, p: &BigInt) -> u64 {
    let va = v_p(a, p).map(|v| 2 * v);
    let vb = v_p(b, p).map(|v| 1 + 2 * v);
    match (va, vb) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) => x,
        (None, Some(y)) => y,
        (None, None) => panic!("valuation of zero"),
    }
}

/// v_P(g(alpha)) at the prime of Z[alpha] above p that corresponds to
/// `factors[index]`, a factor of f mod p with residue degree `f_deg`.
pub(crate) fn general_valuation(
    f: &Poly<BigInt>,
    factors: &[FpPoly],
    index: usize,
    p: u64,
    g: &Poly<BigInt>,
    start: u32,
) -> Result<(u64, u32)> {
    let pb = BigInt::from(p);
    let f_deg = factors[index].degree().unwrap() as u64;
    let mut n = start.max(2);
    loop {
        let lifted = hensel_lift(f, factors, p, n)?;
        let r = resultant(&lifted[index], g);
        if let Some(v) = v_p(&r, &pb) {
            if v < u64::from(n / 2) {
                debug_assert_eq!(v % f_deg, 0);
                return Ok((v / f_deg, n));
            }
        }
        if n > 1 << 16 {
            return Err(Error::PrecisionExhausted);
        }
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn tonelli_shanks() {
        for p in [7i64, 17, 41, 97, 113, 1_000_000_007] {
            let pb = b(p);
            for d in 1..60i64 {
                if legendre(&b(d), &pb) == 1 {
                    let r = sqrt_mod_prime(&b(d), &pb);
                    assert_eq!((&r * &r - d).mod_floor(&pb), b(0), "d={d} p={p}");
                    assert!(r <= &pb - &r);
                }
            }
        }
    }

    #[test]
    fn hensel_sqrt() {
        let p = b(7);
        let r = lift_sqrt_odd(&b(2), &b(3), &p, 5);
        let m = b(7).pow(5);
        assert_eq!((&r * &r - b(2)).mod_floor(&m), b(0));
        assert_eq!(&r % 7, b(3));
        for res in [1u32, 3] {
            let r = lift_sqrt_two(&b(17), res, 20);
            let m = BigInt::one() << 20;
            assert_eq!((&r * &r - b(17)).mod_floor(&m), b(0));
            assert_eq!(&r % 4u32, b(res as i64));
        }
        let r = lift_sqrt_two(&b(-7), 1, 10);
        assert_eq!((&r * &r + b(7)).mod_floor(&b(1024)), b(0));
    }

    #[test]
    fn ramified_rule() {
        // sqrt 2 at P_2 has valuation 1, 2 has valuation 2 (odd rule checked at p=3, d=3)
        assert_eq!(ramified_odd_valuation(&b(0), &b(1), &b(3)), 1);
        assert_eq!(ramified_odd_valuation(&b(3), &b(0), &b(3)), 2);
        assert_eq!(ramified_odd_valuation(&b(9), &b(3), &b(3)), 3);
    }
}
