//! Complex ball arithmetic and certified isolation of the complex roots of a
//! squarefree integer polynomial.
//!
//! Approximations come from Aberth iteration; each approximation `z` is then
//! certified by the inclusion disk of radius `n |f(z)| / |f'(z)|`, which
//! contains a root. Pairwise disjoint disks contain exactly one root each.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::bigfloat::{BigFloat, Mag, MAX_PRECISION};
use super::poly::Poly;
use super::Rat;
use crate::error::AlgebraError;

/// Rectangular complex ball: real and imaginary balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CBall {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl CBall {
    pub fn real(re: BigFloat) -> Self {
        let prec = re.precision();
        CBall { re, im: BigFloat::zero(prec) }
    }

    pub fn from_rat(q: &Rat, prec: u32) -> Self {
        CBall::real(BigFloat::from_rat(q, prec))
    }

    pub fn add(&self, o: &Self) -> Self {
        CBall { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        CBall { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        CBall {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn mul_real(&self, x: &BigFloat) -> Self {
        CBall { re: self.re.mul(x), im: self.im.mul(x) }
    }

    pub fn conj(&self) -> Self {
        CBall { re: self.re.clone(), im: self.im.neg() }
    }

    /// |z|^2 as a real ball.
    pub fn norm_sqr(&self) -> BigFloat {
        self.re.sqr().add(&self.im.sqr())
    }

    /// log |z|; `None` if the ball meets zero.
    pub fn ln_abs(&self) -> Option<BigFloat> {
        let n = self.norm_sqr();
        if !n.is_positive() {
            return None;
        }
        n.ln().map(|l| l.mul_2exp(-1))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        let d = o.norm_sqr();
        let num = self.mul(&o.conj());
        Some(CBall { re: num.re.div(&d)?, im: num.im.div(&d)? })
    }

    fn midpoint(&self) -> Self {
        CBall { re: self.re.midpoint(), im: self.im.midpoint() }
    }

    /// Evaluate a rational polynomial by Horner's rule.
    pub fn eval_poly(f: &Poly<Rat>, z: &CBall) -> CBall {
        let prec = z.re.precision().max(z.im.precision());
        let mut acc = CBall::from_rat(&Rat::zero(), prec);
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(z).add(&CBall::from_rat(c, prec));
        }
        acc
    }
}

/// A certified enclosure of one complex root.
///
/// For real roots `im` is exactly zero. Nonreal roots come in adjacent
/// conjugate pairs, the one with positive imaginary part first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBox {
    pub re: BigFloat,
    pub im: BigFloat,
    pub is_real: bool,
}

impl RootBox {
    pub fn ball(&self) -> CBall {
        CBall { re: self.re.clone(), im: self.im.clone() }
    }

    pub fn radius(&self) -> Mag {
        self.re.radius().max(&self.im.radius())
    }
}

fn f64_roots(f: &Poly<BigInt>) -> Vec<(f64, f64)> {
    let n = f.degree().unwrap();
    let c: Vec<f64> = f.coeffs().iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    let lead = c[n];
    let bound = 1.0 + c[..n].iter().map(|x| (x / lead).abs()).fold(0.0, f64::max);
    let mut z: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            (bound * t.cos(), bound * t.sin())
        })
        .collect();
    let mul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let div = |a: (f64, f64), b: (f64, f64)| {
        let d = b.0 * b.0 + b.1 * b.1;
        ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (mut p, mut dp) = ((0.0, 0.0), (0.0, 0.0));
            for &a in c.iter().rev() {
                dp = mul(dp, z[i]);
                dp = (dp.0 + p.0, dp.1 + p.1);
                p = mul(p, z[i]);
                p.0 += a;
            }
            let w = div(p, dp);
            let mut s = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let r = div((1.0, 0.0), (z[i].0 - z[j].0, z[i].1 - z[j].1));
                    s = (s.0 + r.0, s.1 + r.1);
                }
            }
            let ws = mul(w, s);
            let step = div(w, (1.0 - ws.0, -ws.1));
            if step.0.is_finite() && step.1.is_finite() {
                z[i] = (z[i].0 - step.0, z[i].1 - step.1);
                moved = moved.max(step.0.abs() + step.1.abs());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Aberth refinement on midpoints at working precision `w`.
fn refine(f: &Poly<Rat>, df: &Poly<Rat>, z: &mut [CBall], w: u32) {
    let n = z.len();
    let tol = Mag::pow2(-(w as i64) + 8);
    for _ in 0..100 {
        let mut converged = true;
        for i in 0..n {
            let p = CBall::eval_poly(f, &z[i]).midpoint();
            let dp = CBall::eval_poly(df, &z[i]).midpoint();
            let Some(wv) = p.div(&dp).map(|x| x.midpoint()) else { continue };
            let mut s = CBall::from_rat(&Rat::zero(), w);
            for j in 0..n {
                if j != i {
                    if let Some(r) = CBall::from_rat(&Rat::from_integer(1.into()), w).div(&z[i].sub(&z[j]).midpoint()) {
                        s = s.add(&r.midpoint());
                    }
                }
            }
            let one = CBall::from_rat(&Rat::from_integer(1.into()), w);
            let denom = one.sub(&wv.mul(&s).midpoint()).midpoint();
            let Some(step) = wv.div(&denom).map(|x| x.midpoint()) else { continue };
            let size = step.re.abs_upper().add(&step.im.abs_upper());
            if size.cmp_mag(&tol) == Ordering::Greater {
                converged = false;
            }
            z[i] = z[i].sub(&step).midpoint();
        }
        if converged {
            break;
        }
    }
}

fn rat_sqr_dist(a: &CBall, b: &CBall, conj_b: bool) -> Rat {
    let dr = a.re.mid_rat() - b.re.mid_rat();
    let bi = if conj_b { -b.im.mid_rat() } else { b.im.mid_rat() };
    let di = a.im.mid_rat() - bi;
    &dr * &dr + &di * &di
}

fn disks_apart(a: &CBall, ra: &Mag, b: &CBall, rb: &Mag, conj_b: bool) -> bool {
    let r = ra.add(rb).to_rat();
    rat_sqr_dist(a, b, conj_b) > &r * &r
}

struct Certified {
    centers: Vec<CBall>,
    radii: Vec<Mag>,
}

fn certify(f: &Poly<Rat>, df: &Poly<Rat>, z: &[CBall], w: u32) -> Option<Certified> {
    let n = z.len();
    let deg = BigFloat::from_i64(n as i64, w);
    let mut radii = Vec::with_capacity(n);
    for zi in z {
        let fz = CBall::eval_poly(f, zi).norm_sqr();
        let dfz = CBall::eval_poly(df, zi).norm_sqr();
        let ratio = fz.div(&dfz)?;
        let r2 = ratio.mul(&deg).mul(&deg);
        radii.push(r2.abs_upper().sqrt_upper());
    }
    for i in 0..n {
        for j in i + 1..n {
            if !disks_apart(&z[i], &radii[i], &z[j], &radii[j], false) {
                return None;
            }
        }
    }
    Some(Certified { centers: z.to_vec(), radii })
}

fn ball_of(center: &BigFloat, r: &Mag) -> BigFloat {
    center.midpoint().with_radius(*r)
}

/// Classify certified disks into real roots and conjugate pairs.
fn classify(c: &Certified, target: &Mag) -> Option<Vec<RootBox>> {
    let n = c.centers.len();
    if c.radii.iter().any(|r| r.cmp_mag(target) == Ordering::Greater) {
        return None;
    }
    let mut reals = Vec::new();
    let mut pairs = Vec::new();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        let meets: Vec<usize> = (0..n)
            .filter(|&j| !disks_apart(&c.centers[i], &c.radii[i], &c.centers[j], &c.radii[j], true))
            .collect();
        if meets.len() != 1 {
            return None;
        }
        let j = meets[0];
        let r = c.radii[i];
        if j == i {
            // the conjugate of the unique root in this disk is itself
            let re = ball_of(&c.centers[i].re, &r);
            let prec = re.precision();
            reals.push(RootBox { re, im: BigFloat::zero(prec), is_real: true });
            used[i] = true;
        } else {
            // the disk must avoid the real axis
            let im_rat = c.centers[i].im.mid_rat();
            let r_rat = r.to_rat();
            if im_rat.clone() * im_rat.clone() <= &r_rat * &r_rat || used[j] {
                return None;
            }
            let (top, rr) = if im_rat > Rat::zero() { (i, r) } else { (j, c.radii[j]) };
            let rr = rr.max(&c.radii[if top == i { j } else { i }]);
            let re = ball_of(&c.centers[top].re, &rr);
            let im = ball_of(&c.centers[top].im, &rr);
            let upper = RootBox { re: re.clone(), im: im.clone(), is_real: false };
            let lower = RootBox { re, im: im.neg(), is_real: false };
            pairs.push((upper, lower));
            used[i] = true;
            used[j] = true;
        }
    }
    reals.sort_by(|a, b| a.re.cmp_mid(&b.re));
    pairs.sort_by(|a, b| a.0.re.cmp_mid(&b.0.re).then(a.0.im.cmp_mid(&b.0.im)));
    let mut out = reals;
    for (u, l) in pairs {
        out.push(u);
        out.push(l);
    }
    Some(out)
}

/// Certified enclosures of all complex roots of a squarefree polynomial,
/// each of radius at most `2^-prec`. Real roots come first in increasing
/// order, then conjugate pairs ordered by real part.
pub fn complex_roots(f: &Poly<BigInt>, prec: u32) -> Result<Vec<RootBox>, AlgebraError> {
    let n = f.degree().ok_or(AlgebraError::ZeroPolynomial)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let fq = f.to_rat();
    if n == 1 {
        let root = -fq.coeff(0) / fq.coeff(1);
        return Ok(vec![RootBox {
            re: BigFloat::from_rat(&root, prec + 8),
            im: BigFloat::zero(prec + 8),
            is_real: true,
        }]);
    }
    if !fq.is_squarefree() {
        return Err(AlgebraError::NotSquarefree);
    }
    let df = fq.derivative();
    let target = Mag::pow2(-(prec as i64));
    let mut w = prec + 32;
    let mut z: Vec<CBall> = f64_roots(f)
        .into_iter()
        .map(|(re, im)| CBall {
            re: BigFloat::from_f64(if re.is_finite() { re } else { 0.5 }, w),
            im: BigFloat::from_f64(if im.is_finite() { im } else { 0.5 }, w),
        })
        .collect();
    loop {
        for zi in z.iter_mut() {
            *zi = CBall { re: zi.re.clone().with_precision(w), im: zi.im.clone().with_precision(w) };
        }
        refine(&fq, &df, &mut z, w);
        if let Some(cert) = certify(&fq, &df, &z, w) {
            if let Some(out) = classify(&cert, &target) {
                return Ok(out);
            }
        }
        if w >= MAX_PRECISION + 64 {
            return Err(AlgebraError::PrecisionExhausted);
        }
        w = (2 * w).min(MAX_PRECISION + 64);
    }
}
