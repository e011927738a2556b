//! Feasibility of prescribed functional values on a finite set of valuation
//! atoms, and LP minimization of a functional over the same atoms.
//!
//! The unknowns are nonnegative masses `w_a` on atoms. An atom carries a
//! vector `u` standing for `(v(a_1), ..., v(a_n))` and a class: a finite
//! place over `p` (its mass is scaled by `log p`), an archimedean place, or a
//! free atom (scale 1). The value of a term `t` under `w` is
//! `Σ_a w_a · scale_a · t(u_a)`. Constraints:
//!
//! - `Σ w·scale·u_j = 0` for every generator (product formula),
//! - `|Σ w·scale·t_i(u) - r_i| <= ε` for every prescribed divisor,
//! - `|Σ w·scale·(-min(u_k, 0)) - N| <= ε` with `a_k = 2` (normalization),
//! - `Σ w <= W`, a mass cap that keeps the region bounded.
//!
//! Each `log p` is replaced by a rational midpoint from a shared table so
//! identities between log-combinations survive the substitution exactly.
//! The induced perturbation of any row over the capped region is bounded
//! and instances whose ε does not exceed it are refused.

pub mod simplex;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::algebra::bigfloat::ln_integer;
use crate::algebra::{parse_rat, v_p_rat, LogLinear, Rat, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::places::expr::{parse_expr, Expr};
use crate::places::{Carrier, FieldElem};
use crate::tropical::{self, TropTerm};
use simplex::{farkas, verify_farkas, LinearProgram, LpResult, RowKind};

/// The mass cap `W`: feasible weights satisfy `Σ w <= W`.
pub fn weight_cap() -> Rat {
    Rat::from_integer(BigUint::from(1u32 << 20).into())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AtomClass {
    Finite { p: BigUint },
    Archimedean,
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Atom {
    pub class: AtomClass,
    pub values: Vec<LogLinear>,
}

impl Atom {
    /// `scale · t(u)` as an exact log-combination.
    fn coefficient(&self, t: &TropTerm) -> Result<LogLinear> {
        match &self.class {
            AtomClass::Finite { p } => {
                let u: Option<Vec<Rat>> =
                    self.values.iter().map(|x| x.is_rational().then(|| x.rational().clone())).collect();
                let u = u.ok_or_else(|| Error::InvalidInstance("finite atoms need rational values".into()))?;
                Ok(LogLinear::log_prime(p.clone(), t.eval(&u)?))
            }
            AtomClass::Archimedean | AtomClass::Free => Ok(t.eval_with(&self.values)?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorTarget {
    pub term: TropTerm,
    pub target: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityInstance {
    /// Rational functions over Q in point variables; constants allowed.
    pub generators: Vec<Expr>,
    pub generator_sources: Vec<String>,
    pub divisors: Vec<DivisorTarget>,
    pub atoms: Vec<Atom>,
    pub epsilon: Rat,
    pub normalization: LogLinear,
    pub objective: Option<TropTerm>,
}

/// The system in `A w <= b` form, approximated at some precision, with the
/// per-row meaning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub rows: Vec<Vec<Rat>>,
    pub rhs: Vec<Rat>,
    pub labels: Vec<String>,
    pub objective: Option<Vec<Rat>>,
    pub perturbation_bound: Rat,
    pub precision_bits: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// One multiplier per row of the `A w <= b` system.
    pub multipliers: Vec<Rat>,
    /// Every `w >= 0` violates some row by at least this much.
    pub violation_bound: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible { weights: Vec<Rat> },
    Infeasible { certificate: Certificate },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    /// Optimal objective over the approximated data (minimization only).
    pub objective: Option<Rat>,
    pub perturbation_bound: Rat,
    pub precision_bits: u32,
    pub labels: Vec<String>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        matches!(self.verdict, Verdict::Feasible { .. })
    }
}

/// Rational stand-ins for `log p` with their error bounds.
struct SymbolTable {
    bits: u32,
    entries: BTreeMap<BigUint, (Rat, Rat)>,
}

impl SymbolTable {
    fn new(bits: u32) -> Self {
        SymbolTable { bits, entries: BTreeMap::new() }
    }

    /// `(approximation, error bound)` of a log-combination.
    fn approx(&mut self, x: &LogLinear) -> (Rat, Rat) {
        let mut value = x.rational().clone();
        let mut err = Rat::zero();
        for (p, c) in x.logs() {
            let bits = self.bits;
            let (r, d) = self.entries.entry(p.clone()).or_insert_with(|| {
                let ball = ln_integer(p, bits);
                (ball.mid_rat(), ball.radius().to_rat())
            });
            value += c * &*r;
            err += c.abs() * &*d;
        }
        (value, err)
    }
}

impl FeasibilityInstance {
    fn index_of_two(&self) -> Result<usize> {
        let two = Rat::from_integer(2.into());
        self.generators
            .iter()
            .position(|g| {
                g.vars().is_empty()
                    && g.eval(&Carrier::Rationals, &|_| None).ok().and_then(|v| v.rat().cloned()) == Some(two.clone())
            })
            .ok_or(Error::MissingGenerator2)
    }

    fn validate(&self) -> Result<()> {
        let n = self.generators.len();
        if self.epsilon.is_negative() {
            return Err(Error::InvalidInstance("epsilon must be >= 0".into()));
        }
        if let Some(a) = self.atoms.iter().find(|a| a.values.len() != n) {
            return Err(Error::InvalidInstance(format!(
                "atom has {} values for {n} generators",
                a.values.len()
            )));
        }
        if !self.atoms.iter().any(|a| a.class == AtomClass::Archimedean) {
            return Err(Error::InvalidInstance("at least one archimedean atom is required".into()));
        }
        for t in self.divisors.iter().map(|d| &d.term).chain(self.objective.as_ref()) {
            if t.arity() > n {
                return Err(crate::error::TropError::ArityMismatch { needed: t.arity(), got: n }.into());
            }
        }
        Ok(())
    }

    /// Build the approximated `A w <= b` system with `log p` replaced at
    /// `bits` bits of precision.
    pub fn constraint_system(&self, bits: u32) -> Result<ConstraintSystem> {
        self.validate()?;
        let k2 = self.index_of_two()?;
        let mut b = Builder {
            inst: self,
            table: SymbolTable::new(bits),
            rows: Vec::new(),
            rhs: Vec::new(),
            labels: Vec::new(),
            bound: Rat::zero(),
        };
        for j in 0..self.generators.len() {
            let (row, err) = b.row_of(&TropTerm::var(j + 1))?;
            b.push_range(row, err, (Rat::zero(), Rat::zero()), Rat::zero(), &format!("product formula {}", j + 1));
        }
        for (i, d) in self.divisors.iter().enumerate() {
            let (row, err) = b.row_of(&d.term)?;
            b.push_range(row, err, (d.target.clone(), Rat::zero()), self.epsilon.clone(), &format!("divisor {}", i + 1));
        }
        let h2 = TropTerm::scale(-Rat::one(), TropTerm::min(vec![TropTerm::var(k2 + 1), TropTerm::Zero]));
        let (row, err) = b.row_of(&h2)?;
        let center = b.table.approx(&self.normalization);
        b.push_range(row, err, center, self.epsilon.clone(), "normalization");
        b.rows.push(vec![Rat::one(); self.atoms.len()]);
        b.rhs.push(weight_cap());
        b.labels.push("total mass <= cap".into());
        let objective = match &self.objective {
            Some(t) => Some(b.row_of(t)?.0),
            None => None,
        };
        Ok(ConstraintSystem {
            rows: b.rows,
            rhs: b.rhs,
            labels: b.labels,
            objective,
            perturbation_bound: b.bound,
            precision_bits: bits,
        })
    }
}

struct Builder<'a> {
    inst: &'a FeasibilityInstance,
    table: SymbolTable,
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    labels: Vec<String>,
    bound: Rat,
}

impl Builder<'_> {
    /// Approximated coefficients of a term on every atom, and the largest
    /// coefficient error.
    fn row_of(&mut self, t: &TropTerm) -> Result<(Vec<Rat>, Rat)> {
        let mut row = Vec::with_capacity(self.inst.atoms.len());
        let mut worst = Rat::zero();
        for a in &self.inst.atoms {
            let (v, e) = self.table.approx(&a.coefficient(t)?);
            row.push(v);
            if e > worst {
                worst = e;
            }
        }
        Ok((row, worst))
    }

    /// `center - slack <= row·w <= center + slack` as two `<=` rows. Over
    /// the capped region the approximated row differs from the exact one by
    /// at most `center error + coefficient error · W`.
    fn push_range(&mut self, row: Vec<Rat>, err: Rat, center: (Rat, Rat), slack: Rat, label: &str) {
        let (c, c_err) = center;
        let p = c_err + err * weight_cap();
        if p > self.bound {
            self.bound = p;
        }
        let neg: Vec<Rat> = row.iter().map(|x| -x).collect();
        self.rows.push(row);
        self.rhs.push(&c + &slack);
        self.labels.push(format!("{label} (upper)"));
        self.rows.push(neg);
        self.rhs.push(-(&c - &slack));
        self.labels.push(format!("{label} (lower)"));
    }
}

/// Compact decimal rendering of a small positive rational.
fn sci(q: &Rat) -> String {
    format!("{:.3e}", crate::algebra::BigFloat::from_rat(q, 64).to_f64())
}

fn check_tolerance(inst: &FeasibilityInstance, sys: &ConstraintSystem) -> Result<()> {
    if inst.epsilon <= sys.perturbation_bound {
        return Err(Error::ToleranceTooTight {
            epsilon: inst.epsilon.to_string(),
            bound: sci(&sys.perturbation_bound),
        });
    }
    Ok(())
}

fn lp_of(sys: &ConstraintSystem, cost: Option<&Vec<Rat>>) -> LinearProgram {
    let m = sys.rows.first().map_or(0, Vec::len);
    let mut lp = LinearProgram::new(m);
    for (row, b) in sys.rows.iter().zip(&sys.rhs) {
        lp.push(row.clone(), RowKind::Le, b.clone());
    }
    if let Some(c) = cost {
        lp.cost = c.clone();
    }
    lp
}

fn infeasible(sys: &ConstraintSystem) -> Verdict {
    let y = farkas(&sys.rows, &sys.rhs).expect("an infeasible system has a Farkas certificate");
    let violation_bound = verify_farkas(&sys.rows, &sys.rhs, &y).expect("certificate verifies");
    Verdict::Infeasible { certificate: Certificate { multipliers: y, violation_bound } }
}

/// Decide feasibility at `bits` bits of `log p` precision.
pub fn solve_feasible_at(inst: &FeasibilityInstance, bits: u32) -> Result<FeasibilityReport> {
    let sys = inst.constraint_system(bits)?;
    check_tolerance(inst, &sys)?;
    let verdict = match lp_of(&sys, None).solve() {
        LpResult::Optimal { x, .. } => Verdict::Feasible { weights: x },
        LpResult::Infeasible => infeasible(&sys),
        LpResult::Unbounded => unreachable!("zero objective is bounded"),
    };
    Ok(FeasibilityReport {
        verdict,
        objective: None,
        perturbation_bound: sys.perturbation_bound,
        precision_bits: bits,
        labels: sys.labels,
    })
}

pub fn solve_feasible(inst: &FeasibilityInstance) -> Result<FeasibilityReport> {
    solve_feasible_at(inst, DEFAULT_PRECISION)
}

/// Minimize the objective term over the feasible weights. The optimum is an
/// upper bound for the infimum over all normalized functionals restricted to
/// these atoms. An optimum that saturates the mass cap is reported as
/// `Unbounded`.
pub fn minimize_functional(inst: &FeasibilityInstance, objective: &TropTerm) -> Result<FeasibilityReport> {
    let mut inst = inst.clone();
    inst.objective = Some(objective.clone());
    let sys = inst.constraint_system(DEFAULT_PRECISION)?;
    check_tolerance(&inst, &sys)?;
    match lp_of(&sys, sys.objective.as_ref()).solve() {
        LpResult::Optimal { x, value } => {
            let total: Rat = x.iter().sum();
            if total >= weight_cap() {
                return Err(Error::Unbounded);
            }
            Ok(FeasibilityReport {
                verdict: Verdict::Feasible { weights: x },
                objective: Some(value),
                perturbation_bound: sys.perturbation_bound,
                precision_bits: sys.precision_bits,
                labels: sys.labels,
            })
        }
        LpResult::Infeasible => Ok(FeasibilityReport {
            verdict: infeasible(&sys),
            objective: None,
            perturbation_bound: sys.perturbation_bound,
            precision_bits: sys.precision_bits,
            labels: sys.labels,
        }),
        LpResult::Unbounded => Err(Error::Unbounded),
    }
}

/// The atoms of Q seen by the generators at a rational point: one finite
/// atom per prime dividing some specialized generator, one archimedean atom.
pub fn atoms_at_point(generators: &[Expr], point: &BTreeMap<String, Rat>) -> Result<Vec<Atom>> {
    let q = Carrier::Rationals;
    let vals: Vec<Rat> = generators
        .iter()
        .enumerate()
        .map(|(index, g)| {
            let v = g
                .eval(&q, &|name| point.get(name).map(|x| FieldElem::Rat(x.clone())))
                .map_err(|e| if e == Error::ZeroElement { Error::PointOnSupport { index } } else { e })?;
            let v = v.rat().cloned().expect("rational carrier");
            if v.is_zero() {
                return Err(Error::PointOnSupport { index });
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let mut primes = BTreeSet::new();
    for v in &vals {
        for part in [v.numer(), v.denom()] {
            if part.magnitude() > &BigUint::one() {
                primes.extend(crate::algebra::factor_int(part).into_iter().map(|(p, _)| p));
            }
        }
    }
    let mut atoms: Vec<Atom> = primes
        .into_iter()
        .map(|p| {
            let values = vals.iter().map(|v| LogLinear::from_rat(Rat::from_integer(v_p_rat(v, &p).into()))).collect();
            Atom { class: AtomClass::Finite { p }, values }
        })
        .collect();
    atoms.push(Atom { class: AtomClass::Archimedean, values: vals.iter().map(|v| -LogLinear::log_abs(v)).collect() });
    Ok(atoms)
}

fn rat_of(v: &Value, what: &str) -> Result<Rat> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::InvalidInstance(format!("{what} must be a rational"))),
    };
    parse_rat(&text).ok_or_else(|| Error::InvalidInstance(format!("{what}: bad rational {text:?}")))
}

fn log_of(v: &Value, what: &str) -> Result<LogLinear> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::InvalidInstance(format!("{what} must be a string"))),
    };
    LogLinear::parse(&text).ok_or_else(|| Error::InvalidInstance(format!("{what}: bad value {text:?}")))
}

impl FeasibilityInstance {
    /// Parse the instance document:
    ///
    /// ```text
    /// {"generators": ["2", "y"],
    ///  "divisors": [{"term": "x2", "target": "0"}],
    ///  "atoms": [{"class": "finite", "p": 2, "values": ["1", "0"]},
    ///            {"class": "archimedean", "values": ["-log(2)", "0"]},
    ///            {"class": "free", "values": ["1/2", "-1"]}],
    ///  "points": [{"y": "3/5"}],
    ///  "epsilon": "1/1000",
    ///  "normalization": "log(2)",
    ///  "objective": "-1*min(x2, 0)"}
    /// ```
    /// `points` appends the atoms of Q at each rational point; only
    /// `generators` and `epsilon` are required.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInstance(m.to_string());
        let gens = v.get("generators").and_then(Value::as_array).ok_or_else(|| bad("missing \"generators\""))?;
        let generator_sources: Vec<String> = gens
            .iter()
            .map(|g| match g {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(bad("generators must be strings")),
            })
            .collect::<Result<_>>()?;
        let generators = generator_sources
            .iter()
            .map(|s| parse_expr(s).map_err(|e| bad(&format!("generator {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let divisors = match v.get("divisors") {
            None => Vec::new(),
            Some(ds) => ds
                .as_array()
                .ok_or_else(|| bad("\"divisors\" must be an array"))?
                .iter()
                .map(|d| {
                    let term = d.get("term").and_then(Value::as_str).ok_or_else(|| bad("divisor needs \"term\""))?;
                    let target = rat_of(d.get("target").unwrap_or(&json!("0")), "target")?;
                    Ok(DivisorTarget { term: tropical::parse(term)?, target })
                })
                .collect::<Result<_>>()?,
        };
        let mut atoms = Vec::new();
        if let Some(list) = v.get("atoms") {
            for a in list.as_array().ok_or_else(|| bad("\"atoms\" must be an array"))? {
                let class = match a.get("class").and_then(Value::as_str) {
                    Some("finite") => {
                        let p = a
                            .get("p")
                            .and_then(|p| p.as_u64().map(BigUint::from).or_else(|| p.as_str()?.parse().ok()))
                            .ok_or_else(|| bad("finite atom needs prime \"p\""))?;
                        if !crate::algebra::is_prime(&p) {
                            return Err(bad(&format!("{p} is not prime")));
                        }
                        AtomClass::Finite { p }
                    }
                    Some("archimedean") => AtomClass::Archimedean,
                    Some("free") => AtomClass::Free,
                    _ => return Err(bad("atom class must be finite, archimedean or free")),
                };
                let values = a
                    .get("values")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("atom needs \"values\""))?
                    .iter()
                    .map(|x| log_of(x, "atom value"))
                    .collect::<Result<Vec<_>>>()?;
                atoms.push(Atom { class, values });
            }
        }
        if let Some(points) = v.get("points") {
            for p in points.as_array().ok_or_else(|| bad("\"points\" must be an array"))? {
                let obj = p.as_object().ok_or_else(|| bad("a point maps variable names to rationals"))?;
                let point = obj
                    .iter()
                    .map(|(k, x)| Ok((k.clone(), rat_of(x, "point coordinate")?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                atoms.extend(atoms_at_point(&generators, &point)?);
            }
        }
        let mut seen = BTreeSet::new();
        atoms.retain(|a| seen.insert(a.clone()));
        let epsilon = rat_of(v.get("epsilon").ok_or_else(|| bad("missing \"epsilon\""))?, "epsilon")?;
        let normalization = match v.get("normalization") {
            Some(x) => log_of(x, "normalization")?,
            None => LogLinear::log_prime(2u32.into(), Rat::one()),
        };
        let objective = match v.get("objective").and_then(Value::as_str) {
            Some(t) => Some(tropical::parse(t)?),
            None => None,
        };
        Ok(FeasibilityInstance { generators, generator_sources, divisors, atoms, epsilon, normalization, objective })
    }

    pub fn to_json(&self) -> Value {
        let atoms: Vec<Value> = self
            .atoms
            .iter()
            .map(|a| {
                let values: Vec<String> = a.values.iter().map(ToString::to_string).collect();
                match &a.class {
                    AtomClass::Finite { p } => json!({"class": "finite", "p": p.to_string(), "values": values}),
                    AtomClass::Archimedean => json!({"class": "archimedean", "values": values}),
                    AtomClass::Free => json!({"class": "free", "values": values}),
                }
            })
            .collect();
        let mut out = json!({
            "generators": self.generator_sources,
            "divisors": self.divisors.iter().map(|d| json!({"term": d.term.to_string(), "target": d.target.to_string()})).collect::<Vec<_>>(),
            "atoms": atoms,
            "epsilon": self.epsilon.to_string(),
            "normalization": self.normalization.to_string(),
        });
        if let Some(t) = &self.objective {
            out["objective"] = Value::String(t.to_string());
        }
        out
    }
}

#[cfg(test)]
mod tests;
