//! Resultants as Sylvester determinants, computed fraction-free (Bareiss).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::Poly;

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

fn sylvester(f: &Poly<BigInt>, g: &Poly<BigInt>) -> Vec<Vec<BigInt>> {
    let m = f.degree().unwrap();
    let n = g.degree().unwrap();
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in f.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in g.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Res(f, g) = det Sylvester(f, g). For monic f this equals the product of
/// g over the roots of f.
pub fn resultant(f: &Poly<BigInt>, g: &Poly<BigInt>) -> BigInt {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return BigInt::zero();
    };
    if n == 0 {
        return num_traits::pow(g.coeff(0), m);
    }
    if m == 0 {
        return num_traits::pow(f.coeff(0), n);
    }
    if f.is_monic() && n >= m {
        // monic f: Res(f, g) = prod g(roots of f) = Res(f, g mod f)
        return resultant(f, &g.rem_monic(f));
    }
    determinant(sylvester(f, g))
}

/// Res(f, g) reduced into [0, modulus).
pub fn resultant_mod(f: &Poly<BigInt>, g: &Poly<BigInt>, modulus: &BigInt) -> BigInt {
    resultant(&f.reduce_mod(modulus), &g.reduce_mod(modulus)).mod_floor(modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(c: &[i64]) -> Poly<BigInt> {
        Poly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn examples() {
        let f = zp(&[-2, 0, 1]);
        assert_eq!(resultant(&f, &zp(&[0, 1])), BigInt::from(-2));
        assert_eq!(resultant(&f, &zp(&[1])), BigInt::from(1));
        assert_eq!(resultant(&f, &zp(&[-3, 1])), BigInt::from(7));
    }

    #[test]
    fn reduction_agrees_with_sylvester() {
        let f = zp(&[3, -1, 0, 1]);
        let g = zp(&[1, 2, 3, 4, 5, 6]);
        assert_eq!(resultant(&f, &g), determinant(sylvester(&f, &g)));
    }

    #[test]
    fn bareiss_small() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(3), BigInt::from(2)],
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(2)],
        ];
        assert_eq!(determinant(m), BigInt::from(6));
        let z = vec![vec![BigInt::from(0), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(0)]];
        assert_eq!(determinant(z), BigInt::from(-1));
    }
}
