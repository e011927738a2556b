//! Deterministic candidate streams: bounded rationals, quadratic
//! irrationalities, roots of unity and roots of small integer polynomials.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rat, Poly, Rat};
use crate::error::{Error, Result};
use crate::places::{Carrier, FieldElem};

/// Cyclotomic fields beyond the quadratic ones are used while phi(k) stays
/// at most this.
pub const MAX_CYCLOTOMIC_DEGREE: usize = 8;

/// Upper limit on the number of candidate tuples a search may materialize.
pub const MAX_CANDIDATES: usize = 2_000_000;

/// Elements (a + b sqrt(d)) / c with b != 0, |a|, |b| <= height, 1 <= c <= height.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticClass {
    pub discriminants: Vec<i64>,
    pub height: u64,
}

impl QuadraticClass {
    /// Every squarefree d != 1 with |d| <= max_d, ordered by |d| then sign.
    pub fn up_to(max_d: u64, height: u64) -> Self {
        let mut ds = Vec::new();
        for m in 1..=max_d as i64 {
            for d in [-m, m] {
                if d != 1 && squarefree(d) {
                    ds.push(d);
                }
            }
        }
        QuadraticClass { discriminants: ds, height }
    }
}

/// Roots of irreducible integer polynomials of degree 2 or 3 with
/// coefficients bounded by `coeff`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CustomClass {
    pub degree: u32,
    pub coeff: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateClasses {
    /// Reduced a/b with max(|a|, b) <= B.
    pub rational: Option<u64>,
    pub quadratic: Option<QuadraticClass>,
    /// Primitive k-th roots of unity for k <= K_max.
    pub cyclotomic: Option<u32>,
    pub custom: Option<CustomClass>,
}

impl CandidateClasses {
    pub fn rational(bound: u64) -> Self {
        CandidateClasses { rational: Some(bound), ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInstance(m.to_string()));
        if self.rational.is_none() && self.quadratic.is_none() && self.cyclotomic.is_none() && self.custom.is_none() {
            return bad("no candidate class enabled");
        }
        if self.rational == Some(0) {
            return bad("rational bound must be positive");
        }
        if let Some(q) = &self.quadratic {
            if q.height == 0 || q.discriminants.is_empty() {
                return bad("quadratic class needs a positive height and at least one d");
            }
            if let Some(d) = q.discriminants.iter().find(|&&d| d == 1 || !squarefree(d)) {
                return bad(&format!("quadratic d = {d} must be squarefree and not 0 or 1"));
            }
        }
        if let Some(c) = &self.custom {
            if !(2..=3).contains(&c.degree) || c.coeff == 0 {
                return bad("custom polynomial degree must be 2 or 3 with a positive coefficient bound");
            }
        }
        Ok(())
    }
}

/// One element of a class stream. `grade` orders the merged stream and the
/// tuples built from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub carrier: Carrier,
    pub elem: FieldElem,
    pub grade: u64,
}

fn squarefree(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    let mut n = d.unsigned_abs();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

/// Positive reduced fractions a/b with max(a, b) <= bound, by Stern-Brocot
/// level and then by value.
pub fn stern_brocot(bound: u64) -> Vec<(u64, u64)> {
    fn walk(lo: (u64, u64), hi: (u64, u64), depth: u32, bound: u64, out: &mut Vec<(u32, u64, u64)>) {
        let (a, b) = (lo.0 + hi.0, lo.1 + hi.1);
        if a.max(b) > bound {
            return;
        }
        out.push((depth, a, b));
        walk(lo, (a, b), depth + 1, bound, out);
        walk((a, b), hi, depth + 1, bound, out);
    }
    let mut out = Vec::new();
    walk((0, 1), (1, 0), 0, bound, &mut out);
    out.sort_by(|x, y| x.0.cmp(&y.0).then((x.1 * y.2).cmp(&(y.1 * x.2))));
    out.into_iter().map(|(_, a, b)| (a, b)).collect()
}

fn rationals(bound: u64) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (a, b) in stern_brocot(bound) {
        for s in [1i64, -1] {
            out.push(Candidate {
                carrier: Carrier::Rationals,
                elem: FieldElem::Rat(rat(s * a as i64, b as i64)),
                grade: a.max(b),
            });
        }
    }
    out
}

fn quadratics(q: &QuadraticClass) -> Result<Vec<Candidate>> {
    let h = q.height as i64;
    let mut out = Vec::new();
    for &d in &q.discriminants {
        let k = Carrier::quadratic(BigInt::from(d))?;
        for c in 1..=h {
            for a in -h..=h {
                for b in (-h..=h).filter(|&b| b != 0) {
                    if a.gcd(&b).gcd(&c) != 1 {
                        continue;
                    }
                    out.push(Candidate {
                        carrier: k.clone(),
                        elem: FieldElem::Alg(vec![rat(a, c), rat(b, c)]),
                        grade: a.unsigned_abs().max(b.unsigned_abs()).max(c as u64),
                    });
                }
            }
        }
    }
    // by grade, keeping the (d, c, a, b) order inside a grade
    out.sort_by_key(|c| c.grade);
    Ok(out)
}

/// The k-th cyclotomic polynomial, lowest coefficient first.
pub fn cyclotomic_poly(k: u32) -> Poly<BigInt> {
    let mut f = Poly::new(vec![-BigInt::one()]);
    f = &f + &Poly::monomial(BigInt::one(), k as usize);
    for d in (1..k).filter(|d| k.is_multiple_of(*d)) {
        f = f.div_rem_monic(&cyclotomic_poly(d)).0;
    }
    f
}

fn euler_phi(k: u32) -> usize {
    (1..=k).filter(|&j| j.gcd(&k) == 1).count()
}

/// Primitive k-th roots of unity in the smallest supported carrier.
fn roots_of_unity(k: u32) -> Result<Vec<Candidate>> {
    let at = |carrier: Carrier, elems: Vec<FieldElem>| {
        elems.into_iter().map(|elem| Candidate { carrier: carrier.clone(), elem, grade: 1 }).collect()
    };
    let half = |n| rat(n, 2);
    Ok(match k {
        1 => at(Carrier::Rationals, vec![FieldElem::Rat(rat(1, 1))]),
        2 => at(Carrier::Rationals, vec![FieldElem::Rat(rat(-1, 1))]),
        3 | 6 => {
            let s = if k == 3 { -1 } else { 1 };
            let elems = vec![FieldElem::Alg(vec![half(s), half(1)]), FieldElem::Alg(vec![half(s), half(-1)])];
            at(Carrier::quadratic(BigInt::from(-3))?, elems)
        }
        4 => {
            let elems = vec![FieldElem::Alg(vec![Rat::zero(), rat(1, 1)]), FieldElem::Alg(vec![Rat::zero(), rat(-1, 1)])];
            at(Carrier::quadratic(BigInt::from(-1))?, elems)
        }
        _ if euler_phi(k) <= MAX_CYCLOTOMIC_DEGREE => {
            // cyclotomic polynomials are irreducible, so the field is trusted
            let field = Carrier::number_field(cyclotomic_poly(k), true)?;
            let alpha = field.generator()?;
            let elems =
                (1..k).filter(|j| j.gcd(&k) == 1).map(|j| field.pow(&alpha, j as i64)).collect::<Result<Vec<_>>>()?;
            at(field, elems)
        }
        _ => Vec::new(),
    })
}

fn cyclotomics(kmax: u32) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for k in 1..=kmax {
        out.extend(roots_of_unity(k)?);
    }
    Ok(out)
}

/// A root of the irreducible integer polynomial `f` (lowest first), in a
/// carrier it generates.
fn root_of(f: &[i64]) -> Result<Candidate> {
    let grade = f.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
    let lead = *f.last().unwrap();
    if f.len() == 3 {
        // (-b + s sqrt(d)) / 2a with b^2 - 4ac = s^2 d
        let (c, b, a) = (f[0], f[1], f[2]);
        let disc = b * b - 4 * a * c;
        let (mut s, mut d) = (1i64, disc);
        let mut p = 2;
        while p * p <= d.abs() {
            while d % (p * p) == 0 {
                d /= p * p;
                s *= p;
            }
            p += 1;
        }
        let k = Carrier::quadratic(BigInt::from(d))?;
        return Ok(Candidate { carrier: k, elem: FieldElem::Alg(vec![rat(-b, 2 * a), rat(s, 2 * a)]), grade });
    }
    // alpha = lead * x is a root of the monic x^3 + b x^2 + lead c x + lead^2 e
    let n = f.len() - 1;
    let monic: Vec<BigInt> =
        (0..=n).map(|i| BigInt::from(f[i]) * num_traits::pow(BigInt::from(lead), n - 1 - i.min(n - 1))).collect();
    let mut monic = monic;
    monic[n] = BigInt::one();
    let k = Carrier::number_field(Poly::new(monic), false)?;
    let mut v = vec![Rat::zero(); n];
    v[1] = rat(1, lead);
    Ok(Candidate { carrier: k, elem: FieldElem::Alg(v), grade })
}

fn customs(c: &CustomClass) -> Result<Vec<Candidate>> {
    let b = c.coeff as i64;
    let mut out = Vec::new();
    for n in 2..=c.degree as usize {
        let mut coeffs = vec![-b; n + 1];
        'outer: loop {
            let content = coeffs.iter().fold(0i64, |g, x| g.gcd(x));
            if coeffs[n] > 0 && coeffs[0] != 0 && content == 1 {
                let f = Poly::new(coeffs.iter().map(|&x| Rat::from_integer(x.into())).collect());
                let irrational = n == 3 || !is_square(coeffs[1] * coeffs[1] - 4 * coeffs[2] * coeffs[0]);
                if irrational && f.rational_roots().is_empty() {
                    out.push(root_of(&coeffs)?);
                }
            }
            for x in coeffs.iter_mut() {
                if *x < b {
                    *x += 1;
                    continue 'outer;
                }
                *x = -b;
            }
            break;
        }
    }
    out.sort_by_key(|c| c.grade);
    Ok(out)
}

fn is_square(n: i64) -> bool {
    n >= 0 && {
        let r = (n as f64).sqrt().round() as i64;
        (r - 1..=r + 1).any(|s| s >= 0 && s * s == n)
    }
}

fn key(c: &Candidate) -> (String, String) {
    (c.carrier.to_string(), c.carrier.render(&c.elem))
}

/// The merged stream of all enabled classes: ordered by grade, classes in
/// the order rational, cyclotomic, quadratic, custom within a grade, with
/// duplicates across classes removed.
pub fn enumerate_candidates(classes: &CandidateClasses) -> Result<Vec<Candidate>> {
    classes.validate()?;
    let mut all = Vec::new();
    if let Some(b) = classes.rational {
        all.extend(rationals(b));
    }
    if let Some(k) = classes.cyclotomic {
        all.extend(cyclotomics(k)?);
    }
    if let Some(q) = &classes.quadratic {
        all.extend(quadratics(q)?);
    }
    if let Some(c) = &classes.custom {
        all.extend(customs(c)?);
    }
    all.sort_by_key(|c| c.grade);
    let mut seen = HashSet::new();
    all.retain(|c| seen.insert(key(c)));
    Ok(all)
}

/// A candidate point: one element per variable, all in one carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tuple {
    pub carrier: Carrier,
    pub elems: Vec<FieldElem>,
    pub grade: u64,
}

/// Tuples of `arity` coordinates in graded (sum of grades) order. Each
/// tuple lives in one carrier; rationals are embedded into the other
/// carriers, and tuples made only of rationals are produced once, over Q.
/// Within a grade the order is shuffled by `seed`.
pub fn enumerate_tuples(classes: &CandidateClasses, arity: usize, seed: u64) -> Result<Vec<Tuple>> {
    let stream = enumerate_candidates(classes)?;
    let mut tuples = if arity == 0 {
        vec![Tuple { carrier: Carrier::Rationals, elems: Vec::new(), grade: 0 }]
    } else if arity == 1 {
        stream.into_iter().map(|c| Tuple { carrier: c.carrier, elems: vec![c.elem], grade: c.grade }).collect()
    } else {
        product_tuples(&stream, arity)?
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start = 0;
    while start < tuples.len() {
        let g = tuples[start].grade;
        let end = start + tuples[start..].iter().take_while(|t| t.grade == g).count();
        tuples[start..end].shuffle(&mut rng);
        start = end;
    }
    Ok(tuples)
}

fn product_tuples(stream: &[Candidate], arity: usize) -> Result<Vec<Tuple>> {
    let rationals: Vec<&Candidate> = stream.iter().filter(|c| c.carrier == Carrier::Rationals).collect();
    let mut carriers: Vec<Carrier> = Vec::new();
    for c in stream {
        if c.carrier != Carrier::Rationals && !carriers.contains(&c.carrier) {
            carriers.push(c.carrier.clone());
        }
    }
    let mut groups: Vec<(Carrier, Vec<(FieldElem, u64, bool)>)> =
        vec![(Carrier::Rationals, rationals.iter().map(|c| (c.elem.clone(), c.grade, false)).collect())];
    for k in carriers {
        let mut pool: Vec<(FieldElem, u64, bool)> = Vec::new();
        for c in &rationals {
            pool.push((k.normalize(&c.elem)?, c.grade, false));
        }
        pool.extend(stream.iter().filter(|c| c.carrier == k).map(|c| (c.elem.clone(), c.grade, true)));
        groups.push((k, pool));
    }
    let total: usize = groups.iter().map(|(_, pool)| pool.len().saturating_pow(arity as u32)).sum();
    if total > MAX_CANDIDATES {
        return Err(Error::InvalidInstance(format!(
            "{arity} variables over these classes give more than {MAX_CANDIDATES} candidate tuples"
        )));
    }
    let mut out = Vec::new();
    for (k, pool) in &groups {
        let mut idx = vec![0usize; arity];
        if pool.is_empty() {
            continue;
        }
        loop {
            let native = idx.iter().any(|&i| pool[i].2);
            if native || *k == Carrier::Rationals {
                out.push(Tuple {
                    carrier: k.clone(),
                    elems: idx.iter().map(|&i| pool[i].0.clone()).collect(),
                    grade: idx.iter().map(|&i| pool[i].1).sum(),
                });
            }
            let mut j = arity;
            loop {
                if j == 0 {
                    break;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < pool.len() {
                    break;
                }
                idx[j] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    out.sort_by_key(|t| t.grade);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rendered(cs: &[Candidate]) -> Vec<String> {
        cs.iter().map(|c| c.carrier.render(&c.elem)).collect()
    }

    #[test]
    fn rationals_up_to_two() {
        let cs = enumerate_candidates(&CandidateClasses::rational(2)).unwrap();
        assert_eq!(rendered(&cs), ["1", "-1", "1/2", "-1/2", "2", "-2"]);
    }

    #[test]
    fn rational_count_matches_farey() {
        // reduced a/b with 1 <= a, b <= B, twice for the sign
        for b in [1u64, 5, 17] {
            let brute = (1..=b).flat_map(|x| (1..=b).map(move |y| (x, y))).filter(|(x, y)| x.gcd(y) == 1).count();
            assert_eq!(stern_brocot(b).len(), brute);
            assert_eq!(rationals(b).len(), 2 * brute);
        }
    }

    #[test]
    fn gaussian_unit_box() {
        let q = QuadraticClass { discriminants: vec![-1], height: 1 };
        let cs = enumerate_candidates(&CandidateClasses { quadratic: Some(q), ..Default::default() }).unwrap();
        let mut got = rendered(&cs);
        got.sort();
        let mut want = ["-sqrt(-1)", "sqrt(-1)", "-1 - sqrt(-1)", "-1 + sqrt(-1)", "1 - sqrt(-1)", "1 + sqrt(-1)"];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn small_roots_of_unity() {
        let cs = enumerate_candidates(&CandidateClasses { cyclotomic: Some(4), ..Default::default() }).unwrap();
        assert_eq!(cs.len(), 6);
        for c in &cs {
            let order = c.carrier.root_of_unity_order(&c.elem).unwrap();
            assert!((1..=4).contains(&order), "{}", c.carrier.render(&c.elem));
        }
        let k = Carrier::quadratic(BigInt::from(-3)).unwrap();
        let z3 = &cs.iter().find(|c| c.carrier == k).unwrap().elem;
        let f = k.add(&k.add(&k.mul(z3, z3).unwrap(), z3).unwrap(), &k.from_int(1)).unwrap();
        assert!(k.is_zero(&f));
    }

    #[test]
    fn higher_cyclotomic_fields() {
        assert_eq!(cyclotomic_poly(5), Poly::new([1, 1, 1, 1, 1].map(BigInt::from).to_vec()));
        assert_eq!(cyclotomic_poly(12), Poly::new([1, 0, -1, 0, 1].map(BigInt::from).to_vec()));
        let cs = roots_of_unity(8).unwrap();
        assert_eq!(cs.len(), 4);
        for c in &cs {
            assert_eq!(c.carrier.root_of_unity_order(&c.elem), Some(8));
        }
        assert!(roots_of_unity(17).unwrap().is_empty());
    }

    #[test]
    fn custom_roots_satisfy_their_polynomials() {
        let cs = customs(&CustomClass { degree: 3, coeff: 1 }).unwrap();
        assert!(!cs.is_empty());
        // x^3 - x - 1 gives a cubic field
        assert!(cs.iter().any(|c| c.carrier.degree() == 3));
        let qs = customs(&CustomClass { degree: 2, coeff: 1 }).unwrap();
        assert!(cs.len() > qs.len());
        // x^2 + 1, x^2 + x + 1, x^2 - x - 1 and friends: all quadratic
        assert!(qs.iter().all(|c| c.carrier.degree() == 2));
        assert!(qs.iter().any(|c| c.carrier.quadratic_d() == Some(&BigInt::from(5))));
    }

    #[test]
    fn no_duplicates_and_tuples() {
        let classes = CandidateClasses {
            rational: Some(3),
            cyclotomic: Some(6),
            quadratic: Some(QuadraticClass::up_to(3, 2)),
            ..Default::default()
        };
        let cs = enumerate_candidates(&classes).unwrap();
        let keys: HashSet<_> = cs.iter().map(key).collect();
        assert_eq!(keys.len(), cs.len());
        let ts = enumerate_tuples(&CandidateClasses::rational(2), 2, 0).unwrap();
        assert_eq!(ts.len(), 36);
        assert!(ts.windows(2).all(|w| w[0].grade <= w[1].grade));
        assert_eq!(ts, enumerate_tuples(&CandidateClasses::rational(2), 2, 0).unwrap());
    }
}
