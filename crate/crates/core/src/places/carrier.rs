//! Carrier fields and their elements: Q, quadratic fields Q(sqrt d), number
//! fields Q(alpha) given by a monic irreducible integer polynomial, and
//! rational function fields F_p(t).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{
    complex_roots, factor_int, is_prime, resultant, FpPoly, Poly, Rat, RootBox,
};
use crate::error::{Error, Result};

/// Data shared by quadratic and general number fields.
#[derive(Debug)]
pub struct AlgebraicField {
    d: Option<BigInt>,
    min_poly: Poly<BigInt>,
    min_poly_q: Poly<Rat>,
    roots: Mutex<BTreeMap<u32, Arc<Vec<RootBox>>>>,
}

impl AlgebraicField {
    fn new(d: Option<BigInt>, min_poly: Poly<BigInt>) -> Self {
        let min_poly_q = min_poly.to_rat();
        AlgebraicField { d, min_poly, min_poly_q, roots: Mutex::new(BTreeMap::new()) }
    }

    pub fn min_poly(&self) -> &Poly<BigInt> {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.min_poly.degree().expect("nonzero minimal polynomial")
    }

    /// Certified complex roots with radius below `2^-prec`, cached.
    pub fn roots(&self, prec: u32) -> Result<Arc<Vec<RootBox>>> {
        if let Some(r) = self.roots.lock().unwrap().range(prec..).next() {
            return Ok(r.1.clone());
        }
        let roots = Arc::new(complex_roots(&self.min_poly, prec).map_err(|_| Error::PrecisionExhausted)?);
        self.roots.lock().unwrap().insert(prec, roots.clone());
        Ok(roots)
    }
}

#[derive(Clone, Debug)]
pub enum Carrier {
    Rationals,
    Quadratic(Arc<AlgebraicField>),
    NumberField(Arc<AlgebraicField>),
    FunctionField(u64),
}

impl PartialEq for Carrier {
    fn eq(&self, o: &Self) -> bool {
        match (self, o) {
            (Carrier::Rationals, Carrier::Rationals) => true,
            (Carrier::Quadratic(a), Carrier::Quadratic(b)) => a.d == b.d,
            (Carrier::NumberField(a), Carrier::NumberField(b)) => a.min_poly == b.min_poly,
            (Carrier::FunctionField(p), Carrier::FunctionField(q)) => p == q,
            _ => false,
        }
    }
}

impl Eq for Carrier {}

/// F_p(t) element num/den with den monic and gcd(num, den) = 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpFrac {
    num: FpPoly,
    den: FpPoly,
}

impl FpFrac {
    pub fn new(num: FpPoly, den: FpPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroElement);
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if num.is_zero() {
            (num, FpPoly::one(den.modulus()))
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        let lead = den.leading();
        if lead != 1 {
            let inv = crate::algebra::fp::invmod(lead, den.modulus());
            num = num.scale(inv);
            den = den.scale(inv);
        }
        Ok(FpFrac { num, den })
    }

    pub fn num(&self) -> &FpPoly {
        &self.num
    }

    pub fn den(&self) -> &FpPoly {
        &self.den
    }
}

/// An element of a carrier. Number field elements are coefficient vectors in
/// the power basis `1, alpha, ..., alpha^(n-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Rat(Rat),
    Alg(Vec<Rat>),
    Func(FpFrac),
}

impl FieldElem {
    pub fn rat(&self) -> Option<&Rat> {
        match self {
            FieldElem::Rat(q) => Some(q),
            _ => None,
        }
    }
}

fn is_squarefree_int(d: &BigInt) -> bool {
    d.abs().is_one() || factor_int(d).iter().all(|(_, e)| *e == 1)
}

impl Carrier {
    pub fn quadratic(d: BigInt) -> Result<Self> {
        if d.is_zero() || d.is_one() || !is_squarefree_int(&d) {
            return Err(Error::InvalidField(format!("d = {d} must be squarefree and not 0 or 1")));
        }
        let f = Poly::new(vec![-d.clone(), BigInt::zero(), BigInt::one()]);
        Ok(Carrier::Quadratic(Arc::new(AlgebraicField::new(Some(d), f))))
    }

    /// A number field from a monic minimal polynomial (lowest coefficient
    /// first). Irreducibility is checked for degree <= 3 by the rational root
    /// test, and otherwise by finding a prime modulo which the polynomial is
    /// irreducible; `trusted` skips the check when no such prime exists
    /// (for example x^4 + 1).
    pub fn number_field(min_poly: Poly<BigInt>, trusted: bool) -> Result<Self> {
        let n = min_poly.degree().unwrap_or(0);
        if n < 2 {
            return Err(Error::InvalidField("minimal polynomial must have degree >= 2".into()));
        }
        if !min_poly.is_monic() {
            return Err(Error::InvalidField("minimal polynomial must be monic".into()));
        }
        let fq = min_poly.to_rat();
        if !fq.is_squarefree() {
            return Err(Error::InvalidField("minimal polynomial is not squarefree".into()));
        }
        if !trusted {
            let irreducible = if n <= 3 {
                fq.rational_roots().is_empty()
            } else {
                irreducible_mod_some_prime(&min_poly)
            };
            if !irreducible {
                return Err(Error::InvalidField(format!(
                    "could not certify irreducibility of {min_poly}; pass trusted to override"
                )));
            }
        }
        Ok(Carrier::NumberField(Arc::new(AlgebraicField::new(None, min_poly))))
    }

    pub fn function_field(p: u64) -> Result<Self> {
        if !is_prime(&BigUint::from(p)) || p >= 1 << 62 {
            return Err(Error::InvalidField(format!("{p} is not a supported prime")));
        }
        Ok(Carrier::FunctionField(p))
    }

    pub fn algebraic(&self) -> Option<&AlgebraicField> {
        match self {
            Carrier::Quadratic(a) | Carrier::NumberField(a) => Some(a),
            _ => None,
        }
    }

    /// The squarefree d of a quadratic carrier.
    pub fn quadratic_d(&self) -> Option<&BigInt> {
        match self {
            Carrier::Quadratic(a) => a.d.as_ref(),
            _ => None,
        }
    }

    /// [K:Q] for number fields, 1 for Q and for F_p(t).
    pub fn degree(&self) -> usize {
        self.algebraic().map_or(1, AlgebraicField::degree)
    }

    pub fn is_function_field(&self) -> bool {
        matches!(self, Carrier::FunctionField(_))
    }

    pub fn from_rat(&self, q: Rat) -> Result<FieldElem> {
        match self {
            Carrier::Rationals => Ok(FieldElem::Rat(q)),
            Carrier::Quadratic(_) | Carrier::NumberField(_) => {
                let mut v = vec![Rat::zero(); self.degree()];
                v[0] = q;
                Ok(FieldElem::Alg(v))
            }
            Carrier::FunctionField(p) => {
                let pb = BigInt::from(*p);
                let reduce = |x: &BigInt| x.mod_floor(&pb).to_u64().unwrap();
                let den = reduce(q.denom());
                if den == 0 {
                    return Err(Error::InvalidElement(format!("{q} has denominator divisible by {p}")));
                }
                let c = crate::algebra::fp::mulmod(reduce(q.numer()), crate::algebra::fp::invmod(den, *p), *p);
                Ok(FieldElem::Func(FpFrac::new(FpPoly::constant(*p, c), FpPoly::one(*p))?))
            }
        }
    }

    pub fn from_int(&self, n: i64) -> FieldElem {
        self.from_rat(Rat::from_integer(n.into())).expect("integers are in every carrier")
    }

    /// alpha for number fields, t for F_p(t).
    pub fn generator(&self) -> Result<FieldElem> {
        match self {
            Carrier::Rationals => Err(Error::InvalidElement("Q has no generator".into())),
            Carrier::Quadratic(_) | Carrier::NumberField(_) => {
                let mut v = vec![Rat::zero(); self.degree()];
                v[1] = Rat::one();
                Ok(FieldElem::Alg(v))
            }
            Carrier::FunctionField(p) => Ok(FieldElem::Func(FpFrac::new(FpPoly::x(*p), FpPoly::one(*p))?)),
        }
    }

    /// Bring an element into this carrier's representation, embedding
    /// rationals; rejects elements of the wrong shape.
    pub fn normalize(&self, a: &FieldElem) -> Result<FieldElem> {
        match (self, a) {
            (Carrier::Rationals, FieldElem::Rat(_)) => Ok(a.clone()),
            (Carrier::Quadratic(_) | Carrier::NumberField(_), FieldElem::Rat(q)) => self.from_rat(q.clone()),
            (Carrier::Quadratic(_) | Carrier::NumberField(_), FieldElem::Alg(v)) if v.len() == self.degree() => {
                Ok(a.clone())
            }
            (Carrier::FunctionField(_), FieldElem::Rat(q)) => self.from_rat(q.clone()),
            (Carrier::FunctionField(p), FieldElem::Func(fr)) if fr.num.modulus() == *p => Ok(a.clone()),
            _ => Err(Error::CarrierMismatch),
        }
    }

    pub fn is_zero(&self, a: &FieldElem) -> bool {
        match a {
            FieldElem::Rat(q) => q.is_zero(),
            FieldElem::Alg(v) => v.iter().all(Zero::is_zero),
            FieldElem::Func(f) => f.num.is_zero(),
        }
    }

    fn alg_reduce(&self, v: Poly<Rat>) -> FieldElem {
        let a = self.algebraic().expect("algebraic carrier");
        let r = v.rem_monic(&a.min_poly_q);
        let n = a.degree();
        FieldElem::Alg((0..n).map(|i| r.coeff(i)).collect())
    }

    fn alg_poly(v: &[Rat]) -> Poly<Rat> {
        Poly::new(v.to_vec())
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        let (a, b) = (self.normalize(a)?, self.normalize(b)?);
        Ok(match (&a, &b) {
            (FieldElem::Rat(x), FieldElem::Rat(y)) => FieldElem::Rat(x + y),
            (FieldElem::Alg(x), FieldElem::Alg(y)) => FieldElem::Alg(x.iter().zip(y).map(|(s, t)| s + t).collect()),
            (FieldElem::Func(x), FieldElem::Func(y)) => FieldElem::Func(FpFrac::new(
                x.num.mul(&y.den).add(&y.num.mul(&x.den)),
                x.den.mul(&y.den),
            )?),
            _ => return Err(Error::CarrierMismatch),
        })
    }

    pub fn neg(&self, a: &FieldElem) -> Result<FieldElem> {
        let a = self.normalize(a)?;
        Ok(match a {
            FieldElem::Rat(x) => FieldElem::Rat(-x),
            FieldElem::Alg(x) => FieldElem::Alg(x.into_iter().map(|s| -s).collect()),
            FieldElem::Func(x) => FieldElem::Func(FpFrac { num: x.num.neg(), den: x.den }),
        })
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        self.add(a, &self.neg(b)?)
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        let (a, b) = (self.normalize(a)?, self.normalize(b)?);
        Ok(match (&a, &b) {
            (FieldElem::Rat(x), FieldElem::Rat(y)) => FieldElem::Rat(x * y),
            (FieldElem::Alg(x), FieldElem::Alg(y)) => {
                self.alg_reduce(&Self::alg_poly(x) * &Self::alg_poly(y))
            }
            (FieldElem::Func(x), FieldElem::Func(y)) => {
                FieldElem::Func(FpFrac::new(x.num.mul(&y.num), x.den.mul(&y.den))?)
            }
            _ => return Err(Error::CarrierMismatch),
        })
    }

    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        let a = self.normalize(a)?;
        if self.is_zero(&a) {
            return Err(Error::ZeroElement);
        }
        Ok(match a {
            FieldElem::Rat(x) => FieldElem::Rat(x.recip()),
            FieldElem::Alg(x) => {
                let f = &self.algebraic().unwrap().min_poly_q;
                let (g, s, _) = Self::alg_poly(&x).ext_gcd(f);
                debug_assert_eq!(g.degree(), Some(0));
                let s = s.scale(&g.coeff(0).recip());
                self.alg_reduce(s)
            }
            FieldElem::Func(x) => FieldElem::Func(FpFrac::new(x.den, x.num)?),
        })
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        self.mul(a, &self.inv(b)?)
    }

    pub fn pow(&self, a: &FieldElem, e: i64) -> Result<FieldElem> {
        let base = if e < 0 { self.inv(a)? } else { self.normalize(a)? };
        let mut k = e.unsigned_abs();
        let mut acc = self.from_int(1);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = self.mul(&sq, &sq)?;
            }
        }
        Ok(acc)
    }

    /// The nontrivial automorphism sqrt d -> -sqrt d of a quadratic field.
    pub fn conjugate(&self, a: &FieldElem) -> Result<FieldElem> {
        match (self, self.normalize(a)?) {
            (Carrier::Quadratic(_), FieldElem::Alg(v)) => Ok(FieldElem::Alg(vec![v[0].clone(), -v[1].clone()])),
            _ => Err(Error::InvalidField("conjugation is implemented for quadratic fields".into())),
        }
    }

    /// The element as g(alpha)/den with g integral of degree < n.
    pub fn integral_form(&self, a: &FieldElem) -> Result<(Poly<BigInt>, BigInt)> {
        match self.normalize(a)? {
            FieldElem::Alg(v) => Ok(Self::alg_poly(&v).to_integral()),
            _ => Err(Error::CarrierMismatch),
        }
    }

    /// The constant coefficient when the element is rational.
    pub fn as_rational(&self, a: &FieldElem) -> Option<Rat> {
        match a {
            FieldElem::Rat(q) => Some(q.clone()),
            FieldElem::Alg(v) => v[1..].iter().all(Zero::is_zero).then(|| v[0].clone()),
            FieldElem::Func(f) => {
                (f.num.degree().unwrap_or(0) == 0 && f.den.is_one()).then(|| Rat::from_integer(f.num.coeff(0).into()))
            }
        }
    }

    /// The order k of `a` as a root of unity, if it is one. Only orders with
    /// phi(k) <= [K:Q] are possible, and phi(k) >= sqrt(k/2) bounds the search.
    pub fn root_of_unity_order(&self, a: &FieldElem) -> Option<u32> {
        let a = self.normalize(a).ok()?;
        if self.is_zero(&a) || self.is_function_field() || !self.norm(&a).ok()?.abs().is_one() {
            return None;
        }
        let one = self.from_int(1);
        let bound = 2 * self.degree() * self.degree();
        let mut acc = a.clone();
        for k in 1..=bound as u32 {
            if acc == one {
                return Some(k);
            }
            acc = self.mul(&acc, &a).ok()?;
        }
        None
    }

    /// N_{K/Q}(a) = Res(f, g) / den^n for a = g(alpha)/den.
    pub fn norm(&self, a: &FieldElem) -> Result<Rat> {
        let a = self.normalize(a)?;
        if self.is_zero(&a) {
            return Err(Error::ZeroElement);
        }
        match self {
            Carrier::Rationals => Ok(a.rat().unwrap().clone()),
            Carrier::Quadratic(_) | Carrier::NumberField(_) => {
                let (g, den) = self.integral_form(&a)?;
                let f = &self.algebraic().unwrap().min_poly;
                let n = self.degree();
                Ok(Rat::new(resultant(f, &g), num_traits::pow(den, n)))
            }
            Carrier::FunctionField(_) => Err(Error::InvalidField("norm to Q is not defined for F_p(t)".into())),
        }
    }

    /// Human-readable rendering, parseable by the element expression syntax.
    pub fn render(&self, a: &FieldElem) -> String {
        match a {
            FieldElem::Rat(q) => q.to_string(),
            FieldElem::Alg(v) => {
                let gen = match self.quadratic_d() {
                    Some(d) => format!("sqrt({d})"),
                    None => "alpha".to_string(),
                };
                let mut out = String::new();
                for (i, c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mono = match i {
                        0 => String::new(),
                        1 => gen.clone(),
                        _ => format!("{gen}^{i}"),
                    };
                    let mag = c.abs();
                    let body = if mono.is_empty() {
                        mag.to_string()
                    } else if mag.is_one() {
                        mono
                    } else {
                        format!("{mag}*{mono}")
                    };
                    if out.is_empty() {
                        out = if c.is_negative() { format!("-{body}") } else { body };
                    } else {
                        out += if c.is_negative() { " - " } else { " + " };
                        out += &body;
                    }
                }
                if out.is_empty() {
                    "0".into()
                } else {
                    out
                }
            }
            FieldElem::Func(f) => {
                let num = f.num.display_with("t");
                if f.den.is_one() {
                    num
                } else {
                    format!("({num})/({})", f.den.display_with("t"))
                }
            }
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::Rationals => write!(f, "Q"),
            Carrier::Quadratic(a) => write!(f, "Q(sqrt({}))", a.d.as_ref().unwrap()),
            Carrier::NumberField(a) => write!(f, "Q(alpha), alpha root of {}", a.min_poly),
            Carrier::FunctionField(p) => write!(f, "F_{p}(t)"),
        }
    }
}

fn irreducible_mod_some_prime(f: &Poly<BigInt>) -> bool {
    let mut p = 2u64;
    while p < 2000 {
        if is_prime(&BigUint::from(p)) {
            let fbar = crate::algebra::hensel::reduce_to_fp(f, p);
            if fbar.degree() == f.degree() && fbar.is_irreducible() {
                return true;
            }
        }
        p += 1;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn q(n: i64) -> Rat {
        rat(n, 1)
    }

    #[test]
    fn quadratic_arithmetic_and_norm() {
        let k = Carrier::quadratic(2.into()).unwrap();
        let s2 = k.generator().unwrap();
        assert_eq!(k.mul(&s2, &s2).unwrap(), k.from_int(2));
        assert_eq!(k.norm(&s2).unwrap(), q(-2));
        assert_eq!(k.norm(&k.from_int(3)).unwrap(), q(9));
        let u = FieldElem::Alg(vec![q(1), q(1)]);
        assert_eq!(k.norm(&u).unwrap(), q(-1));
        let inv = k.inv(&u).unwrap();
        assert_eq!(inv, FieldElem::Alg(vec![q(-1), q(1)]));
        assert_eq!(k.render(&inv), "-1 + sqrt(2)");
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(Carrier::quadratic(4.into()).is_err());
        assert!(Carrier::quadratic(1.into()).is_err());
        let reducible = Poly::new(vec![BigInt::from(-4), BigInt::zero(), BigInt::one()]);
        assert!(Carrier::number_field(reducible, false).is_err());
        let x4p1 = Poly::new(vec![BigInt::one(), 0.into(), 0.into(), 0.into(), BigInt::one()]);
        assert!(Carrier::number_field(x4p1.clone(), false).is_err());
        assert!(Carrier::number_field(x4p1, true).is_ok());
        assert!(Carrier::function_field(6).is_err());
    }

    #[test]
    fn function_field_fractions() {
        let k = Carrier::function_field(3).unwrap();
        let t = k.generator().unwrap();
        let a = k.add(&t, &k.from_int(1)).unwrap();
        let b = k.div(&k.mul(&a, &t).unwrap(), &a).unwrap();
        assert_eq!(b, t);
        assert_eq!(k.render(&k.inv(&a).unwrap()), "(1)/(t+1)");
        assert!(k.from_rat(rat(1, 3)).is_err());
    }

    #[test]
    fn cubic_inverse() {
        let f = Poly::new(vec![BigInt::from(-2), 0.into(), 0.into(), BigInt::one()]);
        let k = Carrier::number_field(f, false).unwrap();
        let a = FieldElem::Alg(vec![q(1), q(2), q(-1)]);
        let prod = k.mul(&a, &k.inv(&a).unwrap()).unwrap();
        assert_eq!(prod, k.from_int(1));
        // N(alpha) = 2 for x^3 - 2
        assert_eq!(k.norm(&k.generator().unwrap()).unwrap(), q(2));
        assert_eq!(k.root_of_unity_order(&k.generator().unwrap()), None);
    }

    #[test]
    fn roots_of_unity() {
        let k = Carrier::quadratic((-3).into()).unwrap();
        let zeta3 = FieldElem::Alg(vec![rat(-1, 2), rat(1, 2)]);
        assert_eq!(k.root_of_unity_order(&zeta3), Some(3));
        assert_eq!(k.root_of_unity_order(&k.neg(&zeta3).unwrap()), Some(6));
        let i = Carrier::quadratic((-1).into()).unwrap();
        assert_eq!(i.root_of_unity_order(&i.generator().unwrap()), Some(4));
        assert_eq!(Carrier::Rationals.root_of_unity_order(&FieldElem::Rat(q(-1))), Some(2));
        assert_eq!(Carrier::Rationals.root_of_unity_order(&FieldElem::Rat(q(2))), None);
    }
}
