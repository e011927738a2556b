//! Exact arithmetic kernel: big integers and rationals, univariate
//! polynomials over Z, Q and F_p, factorization, Hensel lifting, resultants,
//! ball arithmetic and certified complex root isolation.

pub mod bigfloat;
pub mod complex;
pub mod fp;
pub mod hensel;
pub mod integer;
pub mod logs;
pub mod poly;
pub mod resultant;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

pub use bigfloat::{BigFloat, Mag, DEFAULT_PRECISION, MAX_PRECISION};
pub use complex::{complex_roots, RootBox};
pub use fp::{factor_poly_fp, FpPoly};
pub use hensel::hensel_lift;
pub use integer::{factor_int, is_prime};
pub use logs::LogLinear;
pub use poly::Poly;
pub use resultant::{resultant, resultant_mod};

/// Exact rational number; always reduced with a positive denominator.
pub type Rat = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> Rat {
    Rat::from_integer(n.into())
}

/// p-adic valuation of a nonzero integer.
pub fn v_p_int(n: &BigInt, p: &BigUint) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from_biguint(Sign::Plus, p.clone());
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn v_p_rat(q: &Rat, p: &BigUint) -> i64 {
    v_p_int(q.numer(), p) as i64 - v_p_int(q.denom(), p) as i64
}

/// Least common multiple of the denominators of a list of rationals.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}


/// Parse an exact rational from "a", "a/b", a terminating decimal "1.25" or
/// scientific notation "1e-9".
pub fn parse_rat(text: &str) -> Option<Rat> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let e: i32 = exp.parse().ok()?;
        if mant.contains('/') || e.unsigned_abs() > 10_000 {
            return None;
        }
        let p = Rat::from_integer(num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize));
        let m = parse_rat(mant)?;
        return Some(if e < 0 { m / p } else { m * p });
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (neg, int_part) = match int_part.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int_part),
        };
        if !frac_part.chars().all(|c| c.is_ascii_digit())
            || !int_part.chars().all(|c| c.is_ascii_digit())
            || (int_part.is_empty() && frac_part.is_empty())
        {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let d = num_traits::pow(BigInt::from(10), frac_part.len());
        let q = Rat::new(n, d);
        return Some(if neg { -q } else { q });
    }
    s.parse::<BigInt>().ok().map(Rat::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rat_forms() {
        assert_eq!(parse_rat("12/35"), Some(rat(12, 35)));
        assert_eq!(parse_rat("-4/6"), Some(rat(-2, 3)));
        assert_eq!(parse_rat("1.25"), Some(rat(5, 4)));
        assert_eq!(parse_rat("-0.5"), Some(rat(-1, 2)));
        assert_eq!(parse_rat("7"), Some(rat(7, 1)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("1e-9"), Some(rat(1, 1_000_000_000)));
        assert_eq!(parse_rat("-2.5E2"), Some(rat(-250, 1)));
        assert_eq!(parse_rat("1e"), None);
        assert_eq!(parse_rat("x"), None);
    }

    #[test]
    fn valuations() {
        let p = BigUint::from(5u32);
        assert_eq!(v_p_rat(&rat(12, 35), &p), -1);
        assert_eq!(v_p_rat(&rat(50, 3), &p), 2);
    }
}
