//! Places of a carrier field with their measure weights, and the valuations
//! of field elements at them.
//!
//! The measure puts mass `f log p / n` on a finite place of residue degree
//! `f` above `p` in a field of degree `n`, mass `1/n` on every complex
//! embedding (conjugates counted separately), mass `deg pi` on the place of a
//! monic irreducible `pi` of F_p(t) and mass 1 on its place at infinity.

mod carrier;
pub mod encoding;
pub mod expr;
mod local;

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{
    factor_int, factor_poly_fp, v_p_rat, BigFloat, FpPoly, LogLinear, Rat, MAX_PRECISION,
};
use crate::algebra::complex::CBall;
use crate::algebra::hensel::reduce_to_fp;
use crate::error::{Error, Result};

pub use carrier::{AlgebraicField, Carrier, FieldElem, FpFrac};

/// How a finite place sits above its prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Local {
    /// The place v_p of Q.
    Rational,
    /// Split prime of a quadratic field: the place of the p-adic square root
    /// of d that is congruent to `residue` mod p (mod 4 when p = 2).
    Split { residue: BigInt },
    Inert,
    Ramified,
    /// General number field: the place of `factors[index]`, where `factors`
    /// is the factorization of the minimal polynomial mod p.
    Factor { factors: Arc<Vec<FpPoly>>, index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaceKind {
    Finite { p: BigUint, e: u32, f: u32, local: Local },
    /// Embedding sending alpha to root number `index` of the minimal
    /// polynomial (index 0 for Q).
    Archimedean { index: usize, real: bool },
    FunctionFinite { pi: FpPoly },
    FunctionInfinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub kind: PlaceKind,
    /// [K:Q], 1 for Q and F_p(t).
    pub degree: u32,
}

/// A valuation value: exact rational (finite places), exact combination of
/// logarithms (archimedean values of rationals) or a ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaceValue {
    Exact(Rat),
    Log(LogLinear),
    Approx(BigFloat),
}

impl PlaceValue {
    pub fn as_loglinear(&self) -> Option<LogLinear> {
        match self {
            PlaceValue::Exact(q) => Some(LogLinear::from_rat(q.clone())),
            PlaceValue::Log(l) => Some(l.clone()),
            PlaceValue::Approx(_) => None,
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            PlaceValue::Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn to_ball(&self, prec: u32) -> BigFloat {
        match self {
            PlaceValue::Exact(q) => BigFloat::from_rat(q, prec),
            PlaceValue::Log(l) => l.to_ball(prec),
            PlaceValue::Approx(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PlaceValue::Exact(q) => q.is_zero(),
            PlaceValue::Log(l) => l.is_zero(),
            PlaceValue::Approx(_) => false,
        }
    }
}

impl fmt::Display for PlaceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceValue::Exact(q) => write!(f, "{q}"),
            PlaceValue::Log(l) => write!(f, "{l}"),
            PlaceValue::Approx(b) => write!(f, "{}", b.display_with(20)),
        }
    }
}

impl Place {
    pub fn is_archimedean(&self) -> bool {
        matches!(self.kind, PlaceKind::Archimedean { .. })
    }

    pub fn prime(&self) -> Option<&BigUint> {
        match &self.kind {
            PlaceKind::Finite { p, .. } => Some(p),
            _ => None,
        }
    }

    /// The measure mass, exactly: `(f/n) log p`, `1/n`, `deg pi` or 1.
    pub fn weight(&self) -> LogLinear {
        let n = Rat::from_integer(BigInt::from(self.degree));
        match &self.kind {
            PlaceKind::Finite { p, f, .. } => {
                LogLinear::log_prime(p.clone(), Rat::from_integer(BigInt::from(*f)) / n)
            }
            PlaceKind::Archimedean { .. } => LogLinear::from_rat(n.recip()),
            PlaceKind::FunctionFinite { pi } => {
                LogLinear::from_rat(Rat::from_integer(BigInt::from(pi.degree().unwrap())))
            }
            PlaceKind::FunctionInfinity => LogLinear::from_rat(Rat::from_integer(1.into())),
        }
    }

    /// Short name, e.g. `v_5`, `P_7#1`, `P_2(e=2)`, `sigma_0`, `v_inf`, `v[t+1]`.
    pub fn label(&self) -> String {
        match &self.kind {
            PlaceKind::Finite { p, e, f, local } => match local {
                Local::Rational => format!("v_{p}"),
                Local::Split { residue } => format!("P_{p}[sqrt = {residue}]"),
                Local::Inert => format!("P_{p}(f={f})"),
                Local::Ramified => format!("P_{p}(e={e})"),
                Local::Factor { factors, index } => format!("P_{p}[{}]", factors[*index]),
            },
            PlaceKind::Archimedean { index, real } => {
                if self.degree == 1 {
                    "v_inf".to_string()
                } else if *real {
                    format!("sigma_{index}(real)")
                } else {
                    format!("sigma_{index}(complex)")
                }
            }
            PlaceKind::FunctionFinite { pi } => format!("v[{}]", pi.display_with("t")),
            PlaceKind::FunctionInfinity => "v_inf".to_string(),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

fn finite(p: &BigUint, e: u32, f: u32, local: Local, n: usize) -> Place {
    Place { kind: PlaceKind::Finite { p: p.clone(), e, f, local }, degree: n as u32 }
}

/// The places of a number field above p, with ramification data.
pub fn decompose_prime(carrier: &Carrier, p: &BigUint) -> Result<Vec<Place>> {
    let n = carrier.degree();
    match carrier {
        Carrier::Rationals => Ok(vec![finite(p, 1, 1, Local::Rational, 1)]),
        Carrier::Quadratic(_) => {
            let d = carrier.quadratic_d().unwrap();
            let pb = local::big(p);
            if p == &BigUint::from(2u32) {
                let r8 = d.mod_floor(&BigInt::from(8)).to_i64().unwrap();
                return Ok(match r8 {
                    1 => vec![
                        finite(p, 1, 1, Local::Split { residue: 1.into() }, n),
                        finite(p, 1, 1, Local::Split { residue: 3.into() }, n),
                    ],
                    5 => vec![finite(p, 1, 2, Local::Inert, n)],
                    _ => vec![finite(p, 2, 1, Local::Ramified, n)],
                });
            }
            Ok(match local::legendre(d, &pb) {
                0 => vec![finite(p, 2, 1, Local::Ramified, n)],
                1 => {
                    let r = local::sqrt_mod_prime(d, &pb);
                    let s = &pb - &r;
                    vec![
                        finite(p, 1, 1, Local::Split { residue: r }, n),
                        finite(p, 1, 1, Local::Split { residue: s }, n),
                    ]
                }
                _ => vec![finite(p, 1, 2, Local::Inert, n)],
            })
        }
        Carrier::NumberField(a) => {
            let small = p.to_u64().filter(|&x| x < 1 << 62).ok_or_else(|| Error::UnsupportedRamification {
                p: format!("{p} (prime too large for modular factorization)"),
            })?;
            let fbar = reduce_to_fp(a.min_poly(), small);
            if !fbar.is_squarefree() {
                return Err(Error::UnsupportedRamification { p: p.to_string() });
            }
            let factors: Vec<FpPoly> = factor_poly_fp(&fbar).into_iter().map(|(g, _)| g).collect();
            let factors = Arc::new(factors);
            Ok((0..factors.len())
                .map(|i| {
                    let f = factors[i].degree().unwrap() as u32;
                    finite(p, 1, f, Local::Factor { factors: factors.clone(), index: i }, n)
                })
                .collect())
        }
        Carrier::FunctionField(_) => Err(Error::InvalidField("F_p(t) has no primes of Z".into())),
    }
}

fn archimedean_places(carrier: &Carrier) -> Result<Vec<Place>> {
    match carrier {
        Carrier::Rationals => Ok(vec![Place { kind: PlaceKind::Archimedean { index: 0, real: true }, degree: 1 }]),
        Carrier::Quadratic(a) | Carrier::NumberField(a) => {
            let roots = a.roots(64)?;
            let n = a.degree() as u32;
            Ok(roots
                .iter()
                .enumerate()
                .map(|(index, r)| Place { kind: PlaceKind::Archimedean { index, real: r.is_real }, degree: n })
                .collect())
        }
        Carrier::FunctionField(_) => Ok(vec![Place { kind: PlaceKind::FunctionInfinity, degree: 1 }]),
    }
}

fn primes_of(n: &BigInt, out: &mut Vec<BigUint>) {
    if !n.is_zero() && !n.abs().is_one() {
        out.extend(factor_int(n).into_iter().map(|(p, _)| p));
    }
}

/// Every place where some element has nonzero valuation, plus every
/// archimedean place (the place at infinity for F_p(t)). Finite places come
/// first, ordered by prime and factor; archimedean places follow by root
/// index.
pub fn support_places(carrier: &Carrier, elems: &[FieldElem]) -> Result<Vec<Place>> {
    let mut out = Vec::new();
    match carrier {
        Carrier::FunctionField(p) => {
            let mut polys: Vec<FpPoly> = Vec::new();
            for a in elems {
                let a = carrier.normalize(a)?;
                if carrier.is_zero(&a) {
                    return Err(Error::ZeroElement);
                }
                let FieldElem::Func(fr) = a else { unreachable!() };
                for part in [fr.num(), fr.den()] {
                    if part.degree().unwrap_or(0) > 0 {
                        polys.extend(factor_poly_fp(part).into_iter().map(|(g, _)| g));
                    }
                }
            }
            polys.sort_by(|a, b| a.canonical_cmp(b));
            polys.dedup();
            debug_assert!(polys.iter().all(|g| g.modulus() == *p));
            out.extend(polys.into_iter().map(|pi| Place { kind: PlaceKind::FunctionFinite { pi }, degree: 1 }));
        }
        _ => {
            let mut primes = Vec::new();
            for a in elems {
                let a = carrier.normalize(a)?;
                if carrier.is_zero(&a) {
                    return Err(Error::ZeroElement);
                }
                match &a {
                    FieldElem::Rat(q) => {
                        primes_of(q.numer(), &mut primes);
                        primes_of(q.denom(), &mut primes);
                    }
                    FieldElem::Alg(_) => {
                        let (g, den) = carrier.integral_form(&a)?;
                        let f = carrier.algebraic().unwrap().min_poly();
                        primes_of(&crate::algebra::resultant(f, &g), &mut primes);
                        primes_of(&den, &mut primes);
                    }
                    FieldElem::Func(_) => return Err(Error::CarrierMismatch),
                }
            }
            primes.sort();
            primes.dedup();
            for p in &primes {
                out.extend(decompose_prime(carrier, p)?);
            }
        }
    }
    out.extend(archimedean_places(carrier)?);
    Ok(out)
}

/// All places of the carrier above the given primes plus the archimedean
/// places (used to extend a support set without changing any integral).
pub fn places_over(carrier: &Carrier, primes: &[BigUint]) -> Result<Vec<Place>> {
    let mut out = Vec::new();
    for p in primes {
        out.extend(decompose_prime(carrier, p)?);
    }
    out.extend(archimedean_places(carrier)?);
    Ok(out)
}

/// The valuation of a nonzero element at a place. Finite and function-field
/// places give exact rationals. Archimedean places give `-log|sigma(a)|`,
/// exactly when `a` is rational and as a ball of radius below `2^-prec`
/// otherwise.
pub fn valuation(carrier: &Carrier, place: &Place, a: &FieldElem, prec: u32) -> Result<PlaceValue> {
    let a = carrier.normalize(a)?;
    if carrier.is_zero(&a) {
        return Err(Error::ZeroElement);
    }
    match (&place.kind, carrier) {
        (PlaceKind::Finite { p, .. }, Carrier::Rationals) => {
            Ok(PlaceValue::Exact(Rat::from_integer(v_p_rat(a.rat().unwrap(), p).into())))
        }
        (PlaceKind::Finite { p, e, local, .. }, Carrier::Quadratic(_)) => {
            let d = carrier.quadratic_d().unwrap();
            let (g, c) = carrier.integral_form(&a)?;
            let (aa, bb) = (g.coeff(0), g.coeff(1));
            let pb = local::big(p);
            let v_c = local::v_p(&c, &pb).unwrap() as i64 * i64::from(*e);
            let v = match local {
                Local::Split { residue } => {
                    if p == &BigUint::from(2u32) {
                        let res = residue.to_u32().unwrap();
                        local::split_valuation(&aa, &bb, &pb, |n| local::lift_sqrt_two(d, res, n))
                    } else {
                        local::split_valuation(&aa, &bb, &pb, |n| local::lift_sqrt_odd(d, residue, &pb, n))
                    }
                }
                Local::Inert => {
                    let norm = &aa * &aa - d * &bb * &bb;
                    local::v_p(&norm, &pb).unwrap() / 2
                }
                Local::Ramified if p != &BigUint::from(2u32) => local::ramified_odd_valuation(&aa, &bb, &pb),
                Local::Ramified => {
                    let norm = &aa * &aa - d * &bb * &bb;
                    local::v_p(&norm, &pb).unwrap()
                }
                _ => return Err(Error::CarrierMismatch),
            };
            Ok(PlaceValue::Exact(Rat::from_integer(BigInt::from(v as i64 - v_c))))
        }
        (PlaceKind::Finite { p, local: Local::Factor { factors, index }, .. }, Carrier::NumberField(alg)) => {
            let (g, den) = carrier.integral_form(&a)?;
            let small = p.to_u64().unwrap();
            let (v, _) = local::general_valuation(alg.min_poly(), factors, *index, small, &g, 8)?;
            let v_den = local::v_p(&den, &local::big(p)).unwrap() as i64;
            Ok(PlaceValue::Exact(Rat::from_integer(BigInt::from(v as i64 - v_den))))
        }
        (PlaceKind::Archimedean { index, .. }, _) => archimedean_value(carrier, *index, &a, prec),
        (PlaceKind::FunctionFinite { pi }, Carrier::FunctionField(_)) => {
            let FieldElem::Func(fr) = &a else { return Err(Error::CarrierMismatch) };
            let v = ord_poly(fr.num(), pi) as i64 - ord_poly(fr.den(), pi) as i64;
            Ok(PlaceValue::Exact(Rat::from_integer(v.into())))
        }
        (PlaceKind::FunctionInfinity, Carrier::FunctionField(_)) => {
            let FieldElem::Func(fr) = &a else { return Err(Error::CarrierMismatch) };
            let v = fr.den().degree().unwrap() as i64 - fr.num().degree().unwrap() as i64;
            Ok(PlaceValue::Exact(Rat::from_integer(v.into())))
        }
        _ => Err(Error::CarrierMismatch),
    }
}

/// Like [`valuation`] for a general number field place, starting the Hensel
/// precision at `start` and also returning the precision that was accepted.
pub fn general_valuation_at(
    carrier: &Carrier,
    place: &Place,
    a: &FieldElem,
    start: u32,
) -> Result<(Rat, u32)> {
    let (PlaceKind::Finite { p, local: Local::Factor { factors, index }, .. }, Carrier::NumberField(alg)) =
        (&place.kind, carrier)
    else {
        return Err(Error::CarrierMismatch);
    };
    let (g, den) = carrier.integral_form(a)?;
    let (v, n) = local::general_valuation(alg.min_poly(), factors, *index, p.to_u64().unwrap(), &g, start)?;
    let v_den = local::v_p(&den, &local::big(p)).unwrap() as i64;
    Ok((Rat::from_integer(BigInt::from(v as i64 - v_den)), n))
}

fn ord_poly(f: &FpPoly, pi: &FpPoly) -> u32 {
    let mut f = f.clone();
    let mut k = 0;
    while !f.is_zero() && pi.divides(&f) {
        f = f.div_exact(pi);
        k += 1;
    }
    k
}

fn archimedean_value(carrier: &Carrier, index: usize, a: &FieldElem, prec: u32) -> Result<PlaceValue> {
    if let Some(q) = carrier.as_rational(a) {
        return Ok(PlaceValue::Log(-LogLinear::log_abs(&q)));
    }
    if carrier.root_of_unity_order(a).is_some() {
        return Ok(PlaceValue::Log(LogLinear::zero()));
    }
    let FieldElem::Alg(coeffs) = a else { return Err(Error::CarrierMismatch) };
    let alg = carrier.algebraic().ok_or(Error::CarrierMismatch)?;
    let poly = crate::algebra::Poly::new(coeffs.clone());
    let mut work = prec + 32;
    loop {
        let roots = alg.roots(work)?;
        let z = roots[index].ball();
        let z = CBall { re: z.re.with_precision(work), im: z.im.with_precision(work) };
        let value = CBall::eval_poly(&poly, &z);
        if let Some(l) = value.ln_abs() {
            if l.radius().cmp_mag(&crate::algebra::Mag::pow2(-(prec as i64))).is_le() {
                return Ok(PlaceValue::Approx(l.neg()));
            }
        }
        if work >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted);
        }
        work = (work * 2).min(MAX_PRECISION);
    }
}

/// Valuations of a tuple at one place.
pub fn valuations(carrier: &Carrier, place: &Place, elems: &[FieldElem], prec: u32) -> Result<Vec<PlaceValue>> {
    elems.iter().map(|a| valuation(carrier, place, a, prec)).collect()
}
