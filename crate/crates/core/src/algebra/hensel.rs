//! Multifactor Hensel lifting of a mod-p factorization of a monic integer
//! polynomial to a factorization mod p^N.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::fp::FpPoly;
use super::poly::Poly;
use crate::error::AlgebraError;

fn to_fp(f: &Poly<BigInt>, p: u64) -> FpPoly {
    let pb = BigInt::from(p);
    FpPoly::new(
        p,
        f.coeffs()
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().expect("reduced below p"))
            .collect(),
    )
}

fn from_fp(f: &FpPoly) -> Poly<BigInt> {
    Poly::new(f.coeffs().iter().map(|&c| BigInt::from(c)).collect())
}

/// Lift f = g*h (mod p) to f = G*H (mod p^n), with G, H monic.
fn lift_pair(f: &Poly<BigInt>, g: &FpPoly, h: &FpPoly, p: u64, n: u32) -> (Poly<BigInt>, Poly<BigInt>) {
    let (one, s, t) = g.ext_gcd(h);
    debug_assert!(one.is_one());
    let pb = BigInt::from(p);
    let mut big_g = from_fp(g);
    let mut big_h = from_fp(h);
    let mut pk = pb.clone();
    for _ in 1..n {
        let next = &pk * &pb;
        // e = (f - G*H) / p^k mod p
        let diff = f - &(&big_g * &big_h);
        let e = to_fp(&diff.map(|c| c.div_floor(&pk)), p);
        let te = t.mul(&e);
        let (q, dg) = te.div_rem(g);
        let dh = s.mul(&e).add(&q.mul(h));
        big_g = (&big_g + &from_fp(&dg).scale(&pk)).reduce_mod(&next);
        big_h = (&big_h + &from_fp(&dh).scale(&pk)).reduce_mod(&next);
        pk = next;
    }
    (big_g.reduce_mod(&pk), big_h.reduce_mod(&pk))
}

/// Lift monic irreducible factors of f mod p to monic factors mod p^n.
///
/// The factors must be monic, multiply to f mod p, and f mod p must be
/// squarefree. The output has the same order as the input.
pub fn hensel_lift(
    f: &Poly<BigInt>,
    factors: &[FpPoly],
    p: u64,
    n: u32,
) -> Result<Vec<Poly<BigInt>>, AlgebraError> {
    if !f.is_monic() {
        return Err(AlgebraError::NotMonic);
    }
    let fbar = to_fp(f, p);
    if !fbar.is_squarefree() {
        return Err(AlgebraError::NotSquarefree);
    }
    let product = factors.iter().fold(FpPoly::one(p), |acc, g| acc.mul(g));
    if product != fbar || factors.iter().any(|g| !g.is_monic()) {
        return Err(AlgebraError::FactorMismatch);
    }
    let modulus = num_traits::pow(BigInt::from(p), n as usize);
    if n <= 1 {
        return Ok(factors.iter().map(from_fp).collect());
    }
    let mut out = Vec::with_capacity(factors.len());
    let mut current = f.reduce_mod(&modulus);
    for (i, g) in factors.iter().enumerate() {
        if i + 1 == factors.len() {
            out.push(current.reduce_mod(&modulus));
            break;
        }
        let rest = factors[i + 1..].iter().fold(FpPoly::one(p), |acc, h| acc.mul(h));
        let (big_g, big_h) = lift_pair(&current, g, &rest, p, n);
        out.push(big_g);
        current = big_h;
    }
    if factors.is_empty() {
        debug_assert!(f.degree() == Some(0));
    }
    Ok(out)
}

/// Product of integer polynomials reduced mod m.
pub fn product_mod(fs: &[Poly<BigInt>], m: &BigInt) -> Poly<BigInt> {
    fs.iter()
        .fold(Poly::constant(BigInt::one()), |acc, g| (&acc * g).reduce_mod(m))
}

pub(crate) fn reduce_to_fp(f: &Poly<BigInt>, p: u64) -> FpPoly {
    to_fp(f, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fp::factor_poly_fp;

    fn zp(c: &[i64]) -> Poly<BigInt> {
        Poly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn lifts_sqrt2_mod_49() {
        let f = zp(&[-2, 0, 1]);
        let fs = vec![FpPoly::new(7, vec![3, 1]), FpPoly::new(7, vec![4, 1])];
        let lifted = hensel_lift(&f, &fs, 7, 2).unwrap();
        assert_eq!(lifted, vec![zp(&[10, 1]), zp(&[39, 1])]);
        let m = BigInt::from(49);
        assert_eq!(product_mod(&lifted, &m), f.reduce_mod(&m));
    }

    #[test]
    fn precision_one_is_identity() {
        let f = zp(&[-2, 0, 1]);
        let fs = vec![FpPoly::new(7, vec![3, 1]), FpPoly::new(7, vec![4, 1])];
        assert_eq!(hensel_lift(&f, &fs, 7, 1).unwrap(), vec![zp(&[3, 1]), zp(&[4, 1])]);
    }

    #[test]
    fn rejects_ramified_prime() {
        let f = zp(&[-2, 0, 1]);
        let fs = vec![FpPoly::new(2, vec![0, 1]), FpPoly::new(2, vec![0, 1])];
        assert!(matches!(hensel_lift(&f, &fs, 2, 3), Err(AlgebraError::NotSquarefree)));
    }

    #[test]
    fn lifts_cubic_three_factors() {
        // x^3 - x - 1 mod 5 check against brute force reduction
        let f = zp(&[-7, 2, 0, 1]);
        for p in [3u64, 5, 11, 13, 29] {
            let fbar = reduce_to_fp(&f, p);
            if !fbar.is_squarefree() {
                continue;
            }
            let fs: Vec<FpPoly> = factor_poly_fp(&fbar).into_iter().map(|(g, _)| g).collect();
            for n in [1u32, 2, 5, 9] {
                let m = num_traits::pow(BigInt::from(p), n as usize);
                let lifted = hensel_lift(&f, &fs, p, n).unwrap();
                assert_eq!(product_mod(&lifted, &m), f.reduce_mod(&m), "p={p} n={n}");
                for (l, g) in lifted.iter().zip(&fs) {
                    assert_eq!(&reduce_to_fp(l, p), g);
                    assert!(l.is_monic());
                }
            }
        }
    }
}
