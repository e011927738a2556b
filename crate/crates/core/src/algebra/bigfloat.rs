//! Ball arithmetic over binary floating point numbers.
//!
//! A [`BigFloat`] is a midpoint `mant * 2^exp` together with a radius bound
//! [`Mag`]; the true value always lies in `[mid - rad, mid + rad]`. Every
//! operation rounds the midpoint to the working precision and folds the
//! rounding error into the radius.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rat;

pub const DEFAULT_PRECISION: u32 = 256;
pub const MAX_PRECISION: u32 = 8192;

const MAG_BITS: u64 = 32;

/// Nonnegative upper bound `m * 2^e`, with `m < 2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mag {
    m: u64,
    e: i64,
}

fn bits_of(n: &BigInt) -> u64 {
    n.magnitude().bits()
}

impl Mag {
    pub const ZERO: Mag = Mag { m: 0, e: 0 };

    pub fn is_zero(&self) -> bool {
        self.m == 0
    }

    pub fn pow2(e: i64) -> Mag {
        Mag { m: 1, e }
    }

    fn normalize_up(mut m: u128, mut e: i64) -> Mag {
        if m == 0 {
            return Mag::ZERO;
        }
        while m >= 1 << MAG_BITS {
            m = (m >> 1) + (m & 1);
            e += 1;
        }
        Mag { m: m as u64, e }
    }

    /// Upper bound for |mant| * 2^exp.
    pub fn from_dyadic_upper(mant: &BigInt, exp: i64) -> Mag {
        let b = bits_of(mant);
        if b == 0 {
            return Mag::ZERO;
        }
        if b <= MAG_BITS {
            return Mag { m: mant.magnitude().to_u64().unwrap(), e: exp };
        }
        let shift = b - MAG_BITS;
        let top = (mant.magnitude() >> shift).to_u64().unwrap() as u128 + 1;
        Mag::normalize_up(top, exp + shift as i64)
    }

    /// Lower bound for |mant| * 2^exp (possibly zero).
    pub fn from_dyadic_lower(mant: &BigInt, exp: i64) -> Mag {
        let b = bits_of(mant);
        if b <= MAG_BITS {
            return Mag { m: mant.magnitude().to_u64().unwrap_or(0), e: exp };
        }
        let shift = b - MAG_BITS;
        Mag { m: (mant.magnitude() >> shift).to_u64().unwrap(), e: exp + shift as i64 }
    }

    pub fn from_f64_upper(x: f64) -> Mag {
        assert!(x.is_finite() && x >= 0.0);
        if x == 0.0 {
            return Mag::ZERO;
        }
        let (m, e) = decode_f64(x);
        Mag::from_dyadic_upper(&BigInt::from(m), e).add(&Mag::from_dyadic_upper(&BigInt::one(), e))
    }

    pub fn add(&self, o: &Mag) -> Mag {
        if self.is_zero() {
            return *o;
        }
        if o.is_zero() {
            return *self;
        }
        let e = self.e.max(o.e);
        let shifted = |x: &Mag| -> u128 {
            let d = (e - x.e) as u64;
            if d >= 64 {
                1
            } else {
                let m = x.m as u128;
                let q = m >> d;
                if q << d == m {
                    q
                } else {
                    q + 1
                }
            }
        };
        Mag::normalize_up(shifted(self) + shifted(o), e)
    }

    pub fn mul(&self, o: &Mag) -> Mag {
        if self.is_zero() || o.is_zero() {
            return Mag::ZERO;
        }
        Mag::normalize_up(self.m as u128 * o.m as u128, self.e + o.e)
    }

    /// Upper bound for self / o, where `o` is a lower bound of a positive
    /// quantity.
    pub fn div(&self, o: &Mag) -> Mag {
        assert!(!o.is_zero(), "division by a zero magnitude");
        if self.is_zero() {
            return Mag::ZERO;
        }
        let num = (self.m as u128) << 64;
        let q = num / o.m as u128 + 1;
        Mag::normalize_up(q, self.e - o.e - 64)
    }

    pub fn sqrt_upper(&self) -> Mag {
        if self.is_zero() {
            return *self;
        }
        let (mut m, mut e) = (self.m as u128, self.e);
        if e % 2 != 0 {
            m <<= 1;
            e -= 1;
        }
        // scale up so the integer square root keeps about 32 bits
        m <<= 64;
        e -= 64;
        let mut s = (m as f64).sqrt() as u128;
        while s * s > m {
            s -= 1;
        }
        while s * s < m {
            s += 1;
        }
        Mag::normalize_up(s, e / 2)
    }

    pub fn mul_2exp(&self, k: i64) -> Mag {
        if self.is_zero() {
            return *self;
        }
        Mag { m: self.m, e: self.e + k }
    }

    /// Exact dyadic value (mantissa, exponent).
    pub fn to_dyadic(&self) -> (BigInt, i64) {
        (BigInt::from(self.m), self.e)
    }

    pub fn to_rat(&self) -> Rat {
        dyadic_to_rat(&BigInt::from(self.m), self.e)
    }

    pub fn max(&self, o: &Mag) -> Mag {
        if self.cmp_mag(o) == Ordering::Less {
            *o
        } else {
            *self
        }
    }

    pub fn cmp_mag(&self, o: &Mag) -> Ordering {
        cmp_dyadic(&BigInt::from(self.m), self.e, &BigInt::from(o.m), o.e)
    }

    /// Approximate base-10 logarithm, for display.
    pub fn log10(&self) -> f64 {
        (self.m as f64).log10() + self.e as f64 * std::f64::consts::LOG10_2
    }

    /// Scientific rendering rounded up to one significant digit, e.g. `2e-77`.
    pub fn to_sci_upper(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let l = self.log10();
        let mut x = l.floor();
        let mut d = (10f64.powf(l - x) * (1.0 + 1e-12)).ceil() as u64;
        if d >= 10 {
            d = 1;
            x += 1.0;
        }
        format!("{d}e{}", x as i64)
    }

    pub fn to_f64_upper(&self) -> f64 {
        self.m as f64 * 2f64.powi(self.e.clamp(-1100, 1100) as i32)
    }
}

fn decode_f64(x: f64) -> (i64, i64) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = if exponent == 0 {
        (bits & 0xf_ffff_ffff_ffff) << 1
    } else {
        (bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000
    };
    (sign * mantissa as i64, exponent - 1075)
}

fn dyadic_to_rat(m: &BigInt, e: i64) -> Rat {
    if e >= 0 {
        Rat::from_integer(m << e as usize)
    } else {
        Rat::new(m.clone(), BigInt::one() << (-e) as usize)
    }
}

fn cmp_dyadic(a: &BigInt, ea: i64, b: &BigInt, eb: i64) -> Ordering {
    if a.is_zero() || b.is_zero() {
        return a.sign().cmp(&b.sign()).then(a.cmp(b));
    }
    let e = ea.min(eb);
    let a2 = a << (ea - e) as usize;
    let b2 = b << (eb - e) as usize;
    a2.cmp(&b2)
}

/// Midpoint-radius ball with a binary floating point midpoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    rad: Mag,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0, rad: Mag::ZERO, prec }
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        BigFloat { mant: n.clone(), exp: 0, rad: Mag::ZERO, prec }.rounded()
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        BigFloat::from_int(&BigInt::from(n), prec)
    }

    /// Exact value of a binary64 number.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return BigFloat::zero(prec);
        }
        let (m, e) = decode_f64(x);
        BigFloat { mant: BigInt::from(m), exp: e, rad: Mag::ZERO, prec }.rounded()
    }

    pub fn from_dyadic(mant: BigInt, exp: i64, prec: u32) -> Self {
        BigFloat { mant, exp, rad: Mag::ZERO, prec }.rounded()
    }

    pub fn from_rat(q: &Rat, prec: u32) -> Self {
        let (num, den) = (q.numer(), q.denom());
        if num.is_zero() {
            return BigFloat::zero(prec);
        }
        if den.magnitude().count_ones() == 1 {
            let shift = den.magnitude().trailing_zeros().unwrap_or(0) as i64;
            return BigFloat::from_dyadic(num.clone(), -shift, prec);
        }
        let s = prec as i64 + 2 + bits_of(den) as i64 - bits_of(num) as i64;
        let (n, d) = if s >= 0 {
            (num << s as usize, den.clone())
        } else {
            (num.clone(), den << (-s) as usize)
        };
        let quot = n / d;
        BigFloat { mant: quot, exp: -s, rad: Mag::pow2(-s), prec }.rounded()
    }

    /// Parse a decimal or rational literal ("0.6931", "-3/7", "2").
    pub fn parse(text: &str, prec: u32) -> Option<Self> {
        super::parse_rat(text).map(|q| BigFloat::from_rat(&q, prec))
    }

    pub fn with_radius(mut self, rad: Mag) -> Self {
        self.rad = self.rad.add(&rad);
        self
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(mut self, prec: u32) -> Self {
        self.prec = prec;
        self.rounded()
    }

    pub fn radius(&self) -> Mag {
        self.rad
    }

    /// The midpoint as an exact ball of radius zero.
    pub fn midpoint(&self) -> Self {
        BigFloat { mant: self.mant.clone(), exp: self.exp, rad: Mag::ZERO, prec: self.prec }
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    fn rounded(mut self) -> Self {
        let b = bits_of(&self.mant);
        if b == 0 {
            self.exp = 0;
            return self;
        }
        if b > self.prec as u64 {
            let shift = b - self.prec as u64;
            self.mant >>= shift as usize;
            self.exp += shift as i64;
            self.rad = self.rad.add(&Mag::pow2(self.exp));
        }
        // strip trailing zero bits so equal values compare equal
        if let Some(tz) = self.mant.magnitude().trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz as usize;
                self.exp += tz as i64;
            }
        }
        self
    }

    /// Upper bound of |x| over the ball.
    pub fn abs_upper(&self) -> Mag {
        Mag::from_dyadic_upper(&self.mant, self.exp).add(&self.rad)
    }

    /// Lower bound of |x| over the ball, or `None` if the ball meets zero.
    pub fn abs_lower(&self) -> Option<Mag> {
        if !self.excludes_zero() {
            return None;
        }
        let (rm, re) = self.rad.to_dyadic();
        let e = self.exp.min(re);
        let a = self.mant.abs() << (self.exp - e) as usize;
        let r = rm << (re - e) as usize;
        Some(Mag::from_dyadic_lower(&(a - r), e))
    }

    fn mid_cmp_rad(&self) -> Ordering {
        let (rm, re) = self.rad.to_dyadic();
        cmp_dyadic(&self.mant.abs(), self.exp, &rm, re)
    }

    pub fn excludes_zero(&self) -> bool {
        self.mid_cmp_rad() == Ordering::Greater
    }

    pub fn contains_zero(&self) -> bool {
        !self.excludes_zero()
    }

    /// Certainly positive.
    pub fn is_positive(&self) -> bool {
        self.mant.is_positive() && self.excludes_zero()
    }

    /// Certainly negative.
    pub fn is_negative(&self) -> bool {
        self.mant.is_negative() && self.excludes_zero()
    }

    /// Every point of the ball is >= 0.
    pub fn is_nonnegative(&self) -> bool {
        !self.mant.is_negative() && self.mid_cmp_rad() != Ordering::Less
    }

    pub fn mid_rat(&self) -> Rat {
        dyadic_to_rat(&self.mant, self.exp)
    }

    pub fn lower_rat(&self) -> Rat {
        self.mid_rat() - self.rad.to_rat()
    }

    pub fn upper_rat(&self) -> Rat {
        self.mid_rat() + self.rad.to_rat()
    }

    pub fn to_f64(&self) -> f64 {
        let b = bits_of(&self.mant) as i64;
        if b == 0 {
            return 0.0;
        }
        let shift = (b - 60).max(0);
        let top = (&self.mant >> shift as usize).to_i64().unwrap() as f64;
        top * 2f64.powi((self.exp + shift).clamp(-2000, 2000) as i32)
    }

    pub fn neg(&self) -> Self {
        BigFloat { mant: -&self.mant, exp: self.exp, rad: self.rad, prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        if self.mant.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        if o.mant.is_zero() {
            let mut out = self.clone();
            out.rad = out.rad.add(&o.rad);
            out.prec = prec;
            return out.rounded();
        }
        if self.mant.is_zero() {
            return o.add(self);
        }
        // operand far below the other's last bit: absorb into the radius
        let top_o = o.exp + bits_of(&o.mant) as i64;
        let top_s = self.exp + bits_of(&self.mant) as i64;
        if top_o + 4 < self.exp.min(top_s - prec as i64 - 8) {
            let mut out = self.clone();
            out.rad = out.rad.add(&o.abs_upper());
            out.prec = prec;
            return out.rounded();
        }
        if top_s + 4 < o.exp.min(top_o - prec as i64 - 8) {
            return o.add(self);
        }
        let e = self.exp.min(o.exp);
        let m = (&self.mant << (self.exp - e) as usize) + (&o.mant << (o.exp - e) as usize);
        BigFloat { mant: m, exp: e, rad: self.rad.add(&o.rad), prec }.rounded()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        let a = Mag::from_dyadic_upper(&self.mant, self.exp);
        let b = Mag::from_dyadic_upper(&o.mant, o.exp);
        let rad = a.mul(&o.rad).add(&b.mul(&self.rad)).add(&self.rad.mul(&o.rad));
        BigFloat { mant: &self.mant * &o.mant, exp: self.exp + o.exp, rad, prec }.rounded()
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    /// Division; `None` when the divisor ball contains zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        let prec = self.prec.max(o.prec);
        let lower = o.abs_lower()?;
        if self.mant.is_zero() {
            return Some(BigFloat {
                mant: BigInt::zero(),
                exp: 0,
                rad: self.rad.div(&lower),
                prec,
            });
        }
        let s = prec as i64 + 4 + bits_of(&o.mant) as i64 - bits_of(&self.mant) as i64;
        let (n, d) = if s >= 0 {
            (&self.mant << s as usize, o.mant.clone())
        } else {
            (self.mant.clone(), &o.mant << (-s) as usize)
        };
        let q = n / d;
        let exp = self.exp - o.exp - s;
        let q_abs = Mag::from_dyadic_upper(&q, exp).add(&Mag::pow2(exp));
        let prop = self.rad.add(&q_abs.mul(&o.rad)).div(&lower);
        let rad = prop.add(&Mag::pow2(exp));
        Some(BigFloat { mant: q, exp, rad, prec }.rounded())
    }

    pub fn mul_rat(&self, q: &Rat) -> Self {
        if q.denom().is_one() {
            return self.mul(&BigFloat::from_int(q.numer(), self.prec.max(bits_of(q.numer()) as u32)));
        }
        self.mul(&BigFloat::from_rat(q, self.prec)).with_precision(self.prec)
    }

    pub fn mul_2exp(&self, k: i64) -> Self {
        BigFloat {
            mant: self.mant.clone(),
            exp: if self.mant.is_zero() { 0 } else { self.exp + k },
            rad: self.rad.mul_2exp(k),
            prec: self.prec,
        }
    }

    /// Ball containing min(x, y) for all x, y in the operands.
    pub fn min(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        let pick = if cmp_dyadic(&self.mant, self.exp, &o.mant, o.exp) == Ordering::Greater {
            o
        } else {
            self
        };
        BigFloat { mant: pick.mant.clone(), exp: pick.exp, rad: self.rad.max(&o.rad), prec }
    }

    pub fn max(&self, o: &Self) -> Self {
        self.neg().min(&o.neg()).neg()
    }

    /// Compare midpoints exactly.
    pub fn cmp_mid(&self, o: &Self) -> Ordering {
        cmp_dyadic(&self.mant, self.exp, &o.mant, o.exp)
    }

    /// Natural logarithm; `None` unless the ball is certainly positive.
    pub fn ln(&self) -> Option<Self> {
        if !self.is_positive() {
            return None;
        }
        let prec = self.prec;
        let (mid_log, err_ulps, w) = ln_dyadic(&self.mant, self.exp, prec);
        let mut out = BigFloat {
            mant: mid_log,
            exp: -(w as i64),
            rad: Mag::from_dyadic_upper(&BigInt::from(err_ulps), -(w as i64)),
            prec,
        };
        if !self.rad.is_zero() {
            let lower = self.abs_lower()?;
            out.rad = out.rad.add(&self.rad.div(&lower));
        }
        Some(out.rounded())
    }

    /// Fixed-point decimal rendering of the midpoint with `decimals` digits
    /// after the point (rounded to nearest).
    pub fn to_decimal(&self, decimals: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10), decimals);
        let q = self.mid_rat() * Rat::from_integer(scale);
        let r = q.round().to_integer();
        let neg = r.is_negative();
        let digits = r.abs().to_string();
        let digits = if digits.len() <= decimals {
            format!("{}{}", "0".repeat(decimals + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int_part, frac_part) = digits.split_at(digits.len() - decimals);
        let sign = if neg { "-" } else { "" };
        if decimals == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    /// Decimal midpoint followed by the radius, e.g. `0.69314718… ± 2e-77`.
    pub fn display_with(&self, decimals: usize) -> String {
        if self.rad.is_zero() {
            format!("{} ± 0", self.to_decimal(decimals))
        } else {
            format!("{} ± {}", self.to_decimal(decimals), self.rad.to_sci_upper())
        }
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(30))
    }
}

/// Working-precision natural log of a positive dyadic `mant * 2^exp`.
/// Returns (value at scale 2^-w, error bound in ulps, w).
fn ln_dyadic(mant: &BigInt, exp: i64, prec: u32) -> (BigInt, u64, u32) {
    let w = prec + 24 + (64 - (prec as u64).leading_zeros());
    let one = BigInt::one() << w as usize;
    let b = bits_of(mant) as i64;
    let mut k = exp + b;
    // y = mant / 2^b in [1/2, 1), fixed point at scale 2^-w
    let mut y = if w as i64 >= b {
        mant << (w as i64 - b) as usize
    } else {
        mant >> (b - w as i64) as usize
    };
    // move y into [1/sqrt 2, sqrt 2)
    if (&y * &y) << 1 < &one * &one {
        y <<= 1;
        k -= 1;
    }
    let (log_y, err_y) = atanh_log(&y, w);
    let (ln2, err2) = ln2_fixed(w);
    let value = log_y + &ln2 * k;
    let err = err_y + err2 * k.unsigned_abs() + 3;
    (value, err, w)
}

/// log(y) for a fixed-point y with y/2^w in [1/2, 2], via
/// log y = 2 atanh((y-1)/(y+1)). Returns (value, error ulps).
fn atanh_log(y: &BigInt, w: u32) -> (BigInt, u64) {
    let one = BigInt::one() << w as usize;
    let z = ((y - &one) << w as usize) / (y + &one);
    let z2 = (&z * &z) >> w as usize;
    let mut sum = z.clone();
    let mut power = z;
    let mut terms = 1u64;
    let mut j = 1u64;
    loop {
        // truncate toward zero so negative powers also reach 0
        power = (&power * &z2) / &one;
        if power.is_zero() {
            break;
        }
        sum += &power / BigInt::from(2 * j + 1);
        j += 1;
        terms += 1;
    }
    (sum << 1, 6 * terms + 20)
}

fn ln2_fixed(w: u32) -> (BigInt, u64) {
    static CACHE: OnceLock<Mutex<HashMap<u32, (BigInt, u64)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&w) {
        return hit.clone();
    }
    let two = BigInt::from(2) << w as usize;
    let out = atanh_log(&two, w);
    cache.lock().unwrap().insert(w, out.clone());
    out
}

/// ln(p) for a positive integer, cached per (p, precision).
pub fn ln_integer(p: &BigUint, prec: u32) -> BigFloat {
    static CACHE: OnceLock<Mutex<HashMap<(BigUint, u32), BigFloat>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (p.clone(), prec);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let x = BigFloat::from_dyadic(BigInt::from_biguint(Sign::Plus, p.clone()), 0, prec.max(p.bits() as u32 + 1));
    let out = x.ln().expect("positive integer").with_precision(prec);
    cache.lock().unwrap().insert(key, out.clone());
    out
}
