//! Lattice divisors `t(div(a_1), ..., div(a_n))` kept symbolically as a
//! generator tuple and a tropical term, their pairing with places, the
//! induced functional, and heights of points.
//!
//! Divisors are never expanded into models or Cartier data. Every value
//! consumed here is determined by `beta(v, D ∧ E) = min(beta(v, D), beta(v, E))`
//! and linearity, so evaluating the term on the valuations of the
//! generators is the whole semantics.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::{LogLinear, Rat};
use crate::error::{Error, Result};
use crate::gvf::{Gvf, GvfValue};
use crate::places::encoding::{elem_to_json, parse_elem};
use crate::places::expr::{parse_expr, Expr};
use crate::places::{valuations, Carrier, FieldElem, Place, PlaceValue};
use crate::tropical::{self, TropTerm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeDivisor {
    pub generators: Vec<FieldElem>,
    pub term: TropTerm,
}

impl LatticeDivisor {
    pub fn new(generators: Vec<FieldElem>, term: TropTerm) -> Result<Self> {
        let needed = term.arity();
        if needed > generators.len() {
            return Err(tropical_arity(needed, generators.len()));
        }
        Ok(LatticeDivisor { generators, term })
    }

    /// The principal divisor div(a).
    pub fn principal(a: FieldElem) -> Self {
        LatticeDivisor { generators: vec![a], term: TropTerm::var(1) }
    }

    /// Combine two divisors: the left term keeps its indices, the right term
    /// is shifted past the left generators, generators are concatenated.
    fn combine(&self, o: &Self, f: impl FnOnce(TropTerm, TropTerm) -> TropTerm) -> Self {
        let shifted = o.term.shift(self.generators.len());
        let mut generators = self.generators.clone();
        generators.extend(o.generators.iter().cloned());
        LatticeDivisor { generators, term: f(self.term.clone(), shifted) }
    }

    pub fn wedge(&self, o: &Self) -> Self {
        self.combine(o, |a, b| TropTerm::min(vec![a, b]))
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, TropTerm::add)
    }

    pub fn scale(&self, q: &Rat) -> Self {
        LatticeDivisor { generators: self.generators.clone(), term: TropTerm::scale(q.clone(), self.term.clone()) }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::from_integer(1.into()))
    }
}

fn tropical_arity(needed: usize, got: usize) -> Error {
    crate::error::TropError::ArityMismatch { needed, got }.into()
}

/// `beta(v, D) = t(v(a_1), ..., v(a_n))`: exact at finite places, exact at
/// archimedean places when all generators have exact archimedean values,
/// a ball otherwise.
pub fn beta(carrier: &Carrier, place: &Place, d: &LatticeDivisor, prec: u32) -> Result<PlaceValue> {
    let vals = valuations(carrier, place, &d.generators, prec)?;
    if let Some(qs) = vals.iter().map(|v| v.as_rat().cloned()).collect::<Option<Vec<Rat>>>() {
        return Ok(PlaceValue::Exact(d.term.eval(&qs)?));
    }
    if let Some(ls) = vals.iter().map(PlaceValue::as_loglinear).collect::<Option<Vec<LogLinear>>>() {
        return Ok(PlaceValue::Log(d.term.eval_with(&ls)?));
    }
    let balls: Vec<_> = vals.iter().map(|v| v.to_ball(prec)).collect();
    Ok(PlaceValue::Approx(d.term.eval_with(&balls)?))
}

/// How an effectivity verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// Every place decided rigorously (exact values or balls bounded away
    /// from the negative half-line). Places outside the support see the zero
    /// vector, where every term vanishes, so this covers all places.
    Proven,
    /// Some archimedean beta is a ball straddling 0 and was accepted.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Effectivity {
    Effective { evidence: Evidence },
    NotEffective { witness: Place, beta: PlaceValue },
}

/// Check `beta(v, D) >= 0` at every support place of the generators and
/// every archimedean place.
pub fn is_effective_on_support(gvf: &Gvf, d: &LatticeDivisor) -> Result<Effectivity> {
    let places = gvf.support(&d.generators)?;
    let betas: Result<Vec<PlaceValue>> =
        gvf.execution().map(&places, |p| beta(gvf.carrier(), p, d, gvf.precision())).into_iter().collect();
    let mut evidence = Evidence::Proven;
    for (place, b) in places.into_iter().zip(betas?) {
        let negative = match &b {
            PlaceValue::Exact(q) => q < &Rat::zero(),
            PlaceValue::Log(l) => l.signum() == std::cmp::Ordering::Less,
            PlaceValue::Approx(x) => {
                if !x.is_nonnegative() && !x.is_negative() {
                    evidence = Evidence::Sampled;
                }
                x.is_negative()
            }
        };
        if negative {
            return Ok(Effectivity::NotEffective { witness: place, beta: b });
        }
    }
    Ok(Effectivity::Effective { evidence })
}

/// The value of the standard functional on D, i.e. `R_t(a)`.
pub fn functional_value(gvf: &Gvf, d: &LatticeDivisor) -> Result<GvfValue> {
    gvf.r_t(&d.term, &d.generators)
}

/// Rational functions over Q in named point variables, combined by a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub functions: Vec<Expr>,
    pub sources: Vec<String>,
    pub term: TropTerm,
}

impl Template {
    pub fn parse(functions: &[&str], term: &str) -> Result<Self> {
        let exprs = functions
            .iter()
            .map(|f| parse_expr(f).map_err(|e| Error::InvalidInstance(format!("template function {f:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let term = tropical::parse(term)?;
        if term.arity() > exprs.len() {
            return Err(tropical_arity(term.arity(), exprs.len()));
        }
        Ok(Template { functions: exprs, sources: functions.iter().map(|s| s.to_string()).collect(), term })
    }

    /// Point variables used by the functions, sorted.
    pub fn variables(&self) -> Vec<String> {
        let mut vs = std::collections::BTreeSet::new();
        for f in &self.functions {
            vs.extend(f.vars());
        }
        vs.into_iter().collect()
    }

    pub fn to_json(&self) -> Value {
        json!({"functions": self.sources, "term": self.term.to_string()})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::InvalidInstance("template needs \"functions\" (strings) and \"term\"".into());
        let fs = v.get("functions").and_then(Value::as_array).ok_or_else(bad)?;
        let fs: Vec<&str> = fs.iter().map(Value::as_str).collect::<Option<_>>().ok_or_else(bad)?;
        let term = v.get("term").and_then(Value::as_str).ok_or_else(bad)?;
        Template::parse(&fs, term)
    }

    /// The values f_i(x), or `PointOnSupport` when some f_i is undefined or
    /// zero at the point.
    pub fn specialize(&self, x: &PointSpec) -> Result<Vec<FieldElem>> {
        let k = &x.carrier;
        self.functions
            .iter()
            .enumerate()
            .map(|(index, f)| {
                let v = f.eval(k, &|name| x.coords.get(name).cloned()).map_err(|e| match e {
                    Error::ZeroElement => Error::PointOnSupport { index },
                    other => other,
                })?;
                if k.is_zero(&v) {
                    Err(Error::PointOnSupport { index })
                } else {
                    Ok(v)
                }
            })
            .collect()
    }
}

/// A point: values of the point variables in a common carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSpec {
    pub carrier: Carrier,
    pub coords: BTreeMap<String, FieldElem>,
}

impl PointSpec {
    pub fn new(carrier: Carrier, coords: impl IntoIterator<Item = (String, FieldElem)>) -> Self {
        PointSpec { carrier, coords: coords.into_iter().collect() }
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.coords.iter().map(|(k, v)| (k.clone(), elem_to_json(&self.carrier, v))).collect())
    }

    pub fn from_json(carrier: &Carrier, v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::InvalidElement("point must be an object".into()))?;
        let coords = obj
            .iter()
            .map(|(k, x)| Ok((k.clone(), parse_elem(carrier, x)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(PointSpec { carrier: carrier.clone(), coords })
    }
}

/// `h_D(x) = R_t(f_1(x), ..., f_n(x))` over the carrier of the point.
pub fn height_at_point(gvf: &Gvf, template: &Template, x: &PointSpec) -> Result<GvfValue> {
    if gvf.carrier() != &x.carrier {
        return Err(Error::CarrierMismatch);
    }
    let vals = template.specialize(x)?;
    gvf.r_t(&template.term, &vals)
}

pub fn divisor_to_json(k: &Carrier, d: &LatticeDivisor) -> Value {
    json!({
        "generators": d.generators.iter().map(|a| elem_to_json(k, a)).collect::<Vec<_>>(),
        "term": d.term.to_string(),
    })
}

pub fn divisor_from_json(k: &Carrier, v: &Value) -> Result<LatticeDivisor> {
    let bad = || Error::InvalidInstance("divisor needs \"generators\" (array) and \"term\"".into());
    let gens = v.get("generators").and_then(Value::as_array).ok_or_else(bad)?;
    let gens = gens.iter().map(|g| parse_elem(k, g)).collect::<Result<Vec<_>>>()?;
    if gens.iter().any(|g| k.is_zero(g)) {
        return Err(Error::ZeroElement);
    }
    let term = v.get("term").and_then(Value::as_str).ok_or_else(bad)?;
    LatticeDivisor::new(gens, tropical::parse(term)?)
}

#[cfg(test)]
mod tests;
