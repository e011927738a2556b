//! Integrals `R_t(a) = ∫ t(v(a)) dv` of tropical terms over the places of a
//! carrier, heights, and checks of the globally valued field axioms.
//!
//! Finite places contribute exact multiples of `log p`. Archimedean places
//! contribute exactly when every entry has an exact archimedean value
//! (rationals, roots of unity) and as a ball otherwise.

use std::fmt;

use num_traits::Zero;

use crate::algebra::{BigFloat, LogLinear, Rat, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::places::{support_places, valuations, Carrier, FieldElem, Place, PlaceValue};
use crate::tropical::TropTerm;

/// A value `exact + arch`: `exact` collects the finite places (and exactly
/// known archimedean contributions), `arch` the remaining archimedean ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GvfValue {
    pub exact: LogLinear,
    pub arch: BigFloat,
}

impl GvfValue {
    pub fn zero(prec: u32) -> Self {
        GvfValue { exact: LogLinear::zero(), arch: BigFloat::zero(prec) }
    }

    pub fn from_exact(exact: LogLinear, prec: u32) -> Self {
        GvfValue { exact, arch: BigFloat::zero(prec) }
    }

    /// Whether the value is known exactly, i.e. `arch` is the exact zero.
    pub fn is_exact(&self) -> bool {
        self.arch.is_exact() && self.arch.mid_rat().is_zero()
    }

    /// The total as a ball at the precision of `arch`.
    pub fn rendered(&self) -> BigFloat {
        let prec = self.arch.precision().max(64);
        self.exact.to_ball(prec).add(&self.arch)
    }

    pub fn to_f64(&self) -> f64 {
        self.rendered().to_f64()
    }

    pub fn add(&self, o: &GvfValue) -> GvfValue {
        GvfValue { exact: &self.exact + &o.exact, arch: self.arch.add(&o.arch) }
    }

    pub fn sub(&self, o: &GvfValue) -> GvfValue {
        GvfValue { exact: &self.exact - &o.exact, arch: self.arch.sub(&o.arch) }
    }

    pub fn scale(&self, q: &Rat) -> GvfValue {
        GvfValue { exact: self.exact.scale(q), arch: self.arch.mul_rat(q) }
    }

    /// Certainly >= 0 up to the tracked radius: exact values are decided
    /// exactly, otherwise the ball must reach 0 or above.
    pub fn is_nonnegative_within_radius(&self) -> bool {
        if self.is_exact() {
            return self.exact.signum() != std::cmp::Ordering::Less;
        }
        !self.rendered().is_negative()
    }

    /// Zero up to the tracked radius (exactly zero when the value is exact).
    pub fn is_zero_within_radius(&self) -> bool {
        if self.is_exact() {
            return self.exact.is_zero();
        }
        self.rendered().contains_zero()
    }
}

impl fmt::Display for GvfValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rendered();
        if self.is_exact() {
            write!(f, "{} (= {})", r.display_with(30), self.exact)
        } else if self.exact.is_zero() {
            write!(f, "{}", r.display_with(30))
        } else {
            write!(f, "{} (exact part {})", r.display_with(30), self.exact)
        }
    }
}

/// Outcome of the positivity axiom check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Positivity {
    /// The premise holds at every place and the integral is >= 0.
    Nonnegative { value: GvfValue },
    /// The premise holds but the integral is certainly negative.
    Violation { value: GvfValue },
    /// The premise fails: `t(v(a)) < 0` at `witness`.
    PremiseFails { witness: Place, local_value: String },
}

/// Evaluation context: a carrier, an archimedean precision in bits and an
/// execution strategy for the per-place work.
#[derive(Clone, Debug)]
pub struct Gvf {
    carrier: Carrier,
    precision: u32,
    exec: Execution,
}

/// `t(v(a))` at one place, and its weighted contribution to the integral.
struct Local {
    value: PlaceValue,
    contribution: GvfValue,
}

impl Gvf {
    pub fn new(carrier: Carrier) -> Self {
        Gvf { carrier, precision: DEFAULT_PRECISION, exec: Execution::default() }
    }

    pub fn with_precision(mut self, precision: u32) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    fn local(&self, place: &Place, t: &TropTerm, a: &[FieldElem]) -> Result<Local> {
        let prec = self.precision;
        let vals = valuations(&self.carrier, place, a, prec)?;
        let weight = place.weight();
        if !place.is_archimedean() {
            let xs: Vec<Rat> = vals.iter().map(|v| v.as_rat().cloned().expect("finite valuations are exact")).collect();
            let r = t.eval_with(&xs)?;
            let contribution = GvfValue::from_exact(weight.scale(&r), prec);
            return Ok(Local { value: PlaceValue::Exact(r), contribution });
        }
        let w = weight.rational().clone();
        let exact: Option<Vec<LogLinear>> = vals.iter().map(PlaceValue::as_loglinear).collect();
        match exact {
            Some(ls) => {
                let l = t.eval_with(&ls)?;
                let contribution = GvfValue::from_exact(l.scale(&w), prec);
                Ok(Local { value: PlaceValue::Log(l), contribution })
            }
            None => {
                let balls: Vec<BigFloat> = vals.iter().map(|v| v.to_ball(prec)).collect();
                let b = t.eval_with(&balls)?;
                let contribution = GvfValue { exact: LogLinear::zero(), arch: b.mul_rat(&w).with_precision(prec) };
                Ok(Local { value: PlaceValue::Approx(b), contribution })
            }
        }
    }

    fn locals(&self, places: &[Place], t: &TropTerm, a: &[FieldElem]) -> Result<Vec<Local>> {
        let needed = t.arity();
        if a.len() < needed {
            return Err(crate::error::TropError::ArityMismatch { needed, got: a.len() }.into());
        }
        self.exec.map(places, |p| self.local(p, t, a)).into_iter().collect()
    }

    pub fn support(&self, a: &[FieldElem]) -> Result<Vec<Place>> {
        support_places(&self.carrier, a)
    }

    /// `R_t(a)` summed over the given places, which must contain every place
    /// where some entry has nonzero valuation.
    pub fn r_t_on(&self, places: &[Place], t: &TropTerm, a: &[FieldElem]) -> Result<GvfValue> {
        let locals = self.locals(places, t, a)?;
        Ok(locals.iter().fold(GvfValue::zero(self.precision), |acc, l| acc.add(&l.contribution)))
    }

    pub fn r_t(&self, t: &TropTerm, a: &[FieldElem]) -> Result<GvfValue> {
        let places = self.support(a)?;
        self.r_t_on(&places, t, a)
    }

    /// `height(a) = ∫ -min(v(a), 0) dv`.
    pub fn height(&self, a: &FieldElem) -> Result<GvfValue> {
        self.r_t(&TropTerm::height(), std::slice::from_ref(a))
    }

    /// The residual `∫ v(a) dv`. For a non-rational number field element the
    /// archimedean sum is also known exactly as `-log|N(a)| / n`; that exact
    /// quantity is added to the exact part and subtracted from the ball, so
    /// the exact part vanishes iff the finite valuations match the norm and
    /// the ball contains 0 iff the embeddings agree with it.
    pub fn check_product_formula(&self, a: &FieldElem) -> Result<GvfValue> {
        let raw = self.r_t(&TropTerm::var(1), std::slice::from_ref(a))?;
        if raw.is_exact() || self.carrier.algebraic().is_none() {
            return Ok(raw);
        }
        let n = Rat::from_integer(self.carrier.degree().into());
        let arch_exact = -LogLinear::log_abs(&self.carrier.norm(a)?).scale(&n.recip());
        let ball = arch_exact.to_ball(self.precision);
        Ok(GvfValue { exact: &raw.exact + &arch_exact, arch: raw.arch.sub(&ball) })
    }

    /// `(R_{t1+t2} - R_{t1} - R_{t2}, R_{alpha t1} - alpha R_{t1})` on `a`.
    pub fn check_linearity(
        &self,
        t1: &TropTerm,
        t2: &TropTerm,
        alpha: &Rat,
        a: &[FieldElem],
    ) -> Result<(GvfValue, GvfValue)> {
        let places = self.support(a)?;
        let r1 = self.r_t_on(&places, t1, a)?;
        let r2 = self.r_t_on(&places, t2, a)?;
        let sum = self.r_t_on(&places, &TropTerm::add(t1.clone(), t2.clone()), a)?;
        let scaled = self.r_t_on(&places, &TropTerm::scale(alpha.clone(), t1.clone()), a)?;
        Ok((sum.sub(&r1).sub(&r2), scaled.sub(&r1.scale(alpha))))
    }

    /// Checks the premise `t(v(a)) >= 0` at the zero vector and at every
    /// support place (at an archimedean ball the premise fails only when the
    /// ball is certainly negative), then the sign of the integral.
    ///
    /// Every valuation of a number field or of F_p(t) trivial on F_p is
    /// trivial or a positive multiple of a place valuation, and terms are
    /// positively homogeneous, so these representatives cover the premise
    /// for the carriers implemented here.
    pub fn check_positivity(&self, t: &TropTerm, a: &[FieldElem]) -> Result<Positivity> {
        let at_zero = t.eval(&vec![Rat::zero(); a.len().max(t.arity())])?;
        debug_assert!(at_zero.is_zero());
        let places = self.support(a)?;
        let locals = self.locals(&places, t, a)?;
        for (place, l) in places.iter().zip(&locals) {
            let negative = match &l.value {
                PlaceValue::Exact(q) => q < &Rat::zero(),
                PlaceValue::Log(x) => x.signum() == std::cmp::Ordering::Less,
                PlaceValue::Approx(b) => b.is_negative(),
            };
            if negative {
                return Ok(Positivity::PremiseFails { witness: place.clone(), local_value: l.value.to_string() });
            }
        }
        let value = locals.iter().fold(GvfValue::zero(self.precision), |acc, l| acc.add(&l.contribution));
        if value.is_nonnegative_within_radius() {
            Ok(Positivity::Nonnegative { value })
        } else {
            Ok(Positivity::Violation { value })
        }
    }

    /// `R_t(a) - R_t(b)` where `b` is the image of `a` under a field
    /// automorphism. For quadratic fields `b` is verified to be the
    /// conjugate of `a`; other fields trust the caller.
    pub fn check_galois_invariance(&self, t: &TropTerm, a: &[FieldElem], b: &[FieldElem]) -> Result<GvfValue> {
        if a.len() != b.len() {
            return Err(Error::NotConjugate);
        }
        if self.carrier.quadratic_d().is_some() {
            for (x, y) in a.iter().zip(b) {
                if self.carrier.conjugate(x)? != self.carrier.normalize(y)? {
                    return Err(Error::NotConjugate);
                }
            }
        } else if self.carrier.algebraic().is_none() {
            return Err(Error::InvalidField("Galois invariance is checked over number fields".into()));
        }
        Ok(self.r_t(t, a)?.sub(&self.r_t(t, b)?))
    }
}

impl Default for Gvf {
    fn default() -> Self {
        Gvf::new(Carrier::Rationals)
    }
}

#[cfg(test)]
mod tests;
