//! Integer factorization: trial division to 2^20, then Miller-Rabin and
//! Brent's variant of Pollard rho for whatever cofactor remains.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const TRIAL_LIMIT: u64 = 1 << 20;

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin with the first 13 prime bases; deterministic below 3.3e24,
/// and a fixed-base probable-prime test above that.
pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &b in &MR_BASES {
        let b = BigUint::from(b);
        if *n == b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &b in &MR_BASES {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint, c: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let mut r: u64 = 1;
    let mut q = BigUint::one();
    let m = 128u64;
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if g == *n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if g == *n {
        None
    } else {
        Some(g)
    }
}

fn split_composite(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    let root = n.sqrt();
    if &root * &root == n {
        split_composite(root.clone(), out);
        split_composite(root, out);
        return;
    }
    for c in 1u64.. {
        if let Some(d) = pollard_brent(&n, c) {
            let other = &n / &d;
            split_composite(d, out);
            split_composite(other, out);
            return;
        }
    }
}

/// Prime factorization of |n| as (prime, multiplicity), primes increasing.
/// Returns the empty list for n = ±1; n must be nonzero.
pub fn factor_int(n: &BigInt) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "factor_int of zero");
    let mut m = n.magnitude().clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let push = |p: BigUint, out: &mut Vec<(BigUint, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += 1,
        None => out.push((p, 1)),
    };

    // Word-sized fast path.
    if let Some(mut small) = m.to_u64() {
        let mut d = 2u64;
        while d * d <= small && d <= TRIAL_LIMIT {
            while small % d == 0 {
                push(BigUint::from(d), &mut out);
                small /= d;
            }
            d += if d == 2 { 1 } else { 2 };
        }
        m = BigUint::from(small);
    } else {
        let mut d = 2u64;
        while d <= TRIAL_LIMIT {
            let bd = BigUint::from(d);
            if &bd * &bd > m {
                break;
            }
            while (&m % &bd).is_zero() {
                push(bd.clone(), &mut out);
                m /= &bd;
            }
            d += if d == 2 { 1 } else { 2 };
        }
    }
    let mut rest = Vec::new();
    split_composite(m, &mut rest);
    for p in rest {
        push(p, &mut out);
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Distinct primes dividing a nonzero integer.
pub fn prime_divisors(n: &BigInt) -> Vec<BigUint> {
    factor_int(n).into_iter().map(|(p, _)| p).collect()
}
