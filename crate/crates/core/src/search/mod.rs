//! Bounded searches over algebraic points: find points whose heights
//! approximate prescribed values, and estimate the essential infimum of a
//! height by a running minimum.
//!
//! Candidates are evaluated in parallel and reduced in candidate order, so
//! every result depends only on the instance and its seed.

mod candidates;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::Signed;
use serde_json::{json, Map, Value};

pub use candidates::{
    cyclotomic_poly, enumerate_candidates, enumerate_tuples, stern_brocot, Candidate, CandidateClasses, CustomClass,
    QuadraticClass, Tuple, MAX_CANDIDATES, MAX_CYCLOTOMIC_DEGREE,
};

use crate::algebra::{parse_rat, BigFloat, Rat, DEFAULT_PRECISION};
use crate::divisors::{height_at_point, PointSpec, Template};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::feasibility::{atoms_at_point, minimize_functional, FeasibilityInstance, FeasibilityReport};
use crate::gvf::{Gvf, GvfValue};
use crate::places::encoding::field_to_json;
use crate::places::expr::{parse_expr, Expr};
use crate::places::Carrier;

/// Candidates are handed to the executor in blocks of this size; in
/// first-hit mode the scan stops after the block containing the first hit.
const BLOCK: usize = 256;

/// A height template with the value it should take.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightTarget {
    pub template: Template,
    pub target: BigFloat,
    /// The decimal text the target was read from.
    pub source: String,
}

impl HeightTarget {
    pub fn parse(template: Template, text: &str, prec: u32) -> Result<Self> {
        let target = BigFloat::parse(text, prec)
            .ok_or_else(|| Error::InvalidInstance(format!("target {text:?} is not a decimal number")))?;
        Ok(HeightTarget { template, target, source: text.trim().to_string() })
    }

    /// Target the midpoint of `value`, written with 40 decimals.
    pub fn near(template: Template, value: &BigFloat) -> Self {
        let source = value.to_decimal(40);
        let target = BigFloat::parse(&source, value.precision()).expect("decimal rendering parses");
        HeightTarget { template, target, source }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    First,
    #[default]
    Exhaustive,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Mode::First),
            "exhaustive" => Ok(Mode::Exhaustive),
            _ => Err(Error::InvalidInstance(format!("mode must be first or exhaustive, not {s:?}"))),
        }
    }
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::First => "first",
            Mode::Exhaustive => "exhaustive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchInstance {
    pub templates: Vec<HeightTarget>,
    /// Polynomials that must vanish at the point.
    pub equations: Vec<Expr>,
    pub equation_sources: Vec<String>,
    /// A polynomial that must not vanish at the point.
    pub inequation: Option<(Expr, String)>,
    pub epsilon: Rat,
    pub classes: CandidateClasses,
    pub seed: u64,
    pub threads: usize,
    pub mode: Mode,
    pub precision: u32,
}

impl SearchInstance {
    pub fn new(templates: Vec<HeightTarget>, epsilon: Rat, classes: CandidateClasses) -> Self {
        SearchInstance {
            templates,
            equations: Vec::new(),
            equation_sources: Vec::new(),
            inequation: None,
            epsilon,
            classes,
            seed: 0,
            threads: 0,
            mode: Mode::Exhaustive,
            precision: DEFAULT_PRECISION,
        }
    }

    pub fn with_equations(mut self, equations: &[&str]) -> Result<Self> {
        for e in equations {
            self.equations.push(parse_poly(e)?);
            self.equation_sources.push(e.to_string());
        }
        Ok(self)
    }

    pub fn with_inequation(mut self, h: &str) -> Result<Self> {
        self.inequation = Some((parse_poly(h)?, h.to_string()));
        Ok(self)
    }

    /// Point variables, sorted.
    pub fn variables(&self) -> Vec<String> {
        let mut vs = std::collections::BTreeSet::new();
        for t in &self.templates {
            vs.extend(t.template.variables());
        }
        for e in self.equations.iter().chain(self.inequation.iter().map(|(e, _)| e)) {
            vs.extend(e.vars());
        }
        vs.into_iter().collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_positive() {
            return Err(Error::InvalidInstance("epsilon must be positive".into()));
        }
        if self.templates.is_empty() {
            return Err(Error::InvalidInstance("at least one height template is needed".into()));
        }
        self.classes.validate()
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "schema": "gvf.search/1",
            "templates": self.templates.iter().map(|t| {
                let mut o = t.template.to_json();
                o["target"] = json!(t.source);
                o
            }).collect::<Vec<_>>(),
            "equations": self.equation_sources,
            "epsilon": self.epsilon.to_string(),
            "classes": classes_to_json(&self.classes),
            "seed": self.seed,
            "threads": self.threads,
            "mode": self.mode.as_str(),
            "precision": self.precision,
        });
        if let Some((_, h)) = &self.inequation {
            v["inequation"] = json!(h);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInstance(m.to_string());
        let precision = uint(v, "precision")?.map_or(DEFAULT_PRECISION, |p| p as u32);
        let templates = v
            .get("templates")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"templates\""))?
            .iter()
            .map(|t| {
                let target = match t.get("target") {
                    Some(Value::String(s)) => s.clone(),
                    Some(Value::Number(n)) => n.to_string(),
                    _ => return Err(bad("template needs a decimal \"target\"")),
                };
                HeightTarget::parse(Template::from_json(t)?, &target, precision)
            })
            .collect::<Result<Vec<_>>>()?;
        let epsilon = rat_field(v, "epsilon")?.ok_or_else(|| bad("missing \"epsilon\""))?;
        let classes = classes_from_json(v.get("classes").ok_or_else(|| bad("missing \"classes\""))?)?;
        let mut inst = SearchInstance::new(templates, epsilon, classes);
        let eqs = strings(v, "equations")?;
        inst = inst.with_equations(&eqs.iter().map(String::as_str).collect::<Vec<_>>())?;
        if let Some(h) = v.get("inequation") {
            inst = inst.with_inequation(h.as_str().ok_or_else(|| bad("\"inequation\" must be a string"))?)?;
        }
        inst.seed = uint(v, "seed")?.unwrap_or(0);
        inst.threads = uint(v, "threads")?.unwrap_or(0) as usize;
        if let Some(m) = v.get("mode") {
            inst.mode = m.as_str().ok_or_else(|| bad("\"mode\" must be a string"))?.parse()?;
        }
        inst.precision = precision;
        inst.validate()?;
        Ok(inst)
    }
}

fn parse_poly(text: &str) -> Result<Expr> {
    parse_expr(text).map_err(|e| Error::InvalidInstance(format!("{text:?}: {e}")))
}

fn uint(v: &Value, key: &str) -> Result<Option<u64>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => x.as_u64().map(Some).ok_or_else(|| Error::InvalidInstance(format!("{key:?} must be a nonnegative integer"))),
    }
}

fn rat_field(v: &Value, key: &str) -> Result<Option<Rat>> {
    let text = match v.get(key) {
        None | Some(Value::Null) => return Ok(None),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        Some(_) => return Err(Error::InvalidInstance(format!("{key:?} must be a number or string"))),
    };
    parse_rat(&text).map(Some).ok_or_else(|| Error::InvalidInstance(format!("{key:?}: bad number {text:?}")))
}

fn strings(v: &Value, key: &str) -> Result<Vec<String>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Array(xs)) => xs
            .iter()
            .map(|x| x.as_str().map(str::to_string))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidInstance(format!("{key:?} must be a list of strings"))),
        Some(_) => Err(Error::InvalidInstance(format!("{key:?} must be a list of strings"))),
    }
}

pub fn classes_to_json(c: &CandidateClasses) -> Value {
    let mut o = Map::new();
    if let Some(b) = c.rational {
        o.insert("rational".into(), json!({"bound": b}));
    }
    if let Some(q) = &c.quadratic {
        o.insert("quadratic".into(), json!({"d": q.discriminants, "height": q.height}));
    }
    if let Some(k) = c.cyclotomic {
        o.insert("cyclotomic".into(), json!({"max_order": k}));
    }
    if let Some(p) = &c.custom {
        o.insert("custom".into(), json!({"degree": p.degree, "coeff": p.coeff}));
    }
    Value::Object(o)
}

/// Classes as `{"rational": {"bound": B}, "quadratic": {"d": [..] | "max_d": D,
/// "height": H}, "cyclotomic": {"max_order": K}, "custom": {"degree": n,
/// "coeff": C}}`; a bare integer stands for the single bound of a class.
pub fn classes_from_json(v: &Value) -> Result<CandidateClasses> {
    let bad = |m: &str| Error::InvalidInstance(m.to_string());
    let obj = v.as_object().ok_or_else(|| bad("\"classes\" must be an object"))?;
    let bound = |x: &Value, key: &str| -> Result<u64> {
        x.as_u64()
            .or_else(|| x.get(key).and_then(Value::as_u64))
            .ok_or_else(|| bad(&format!("class bound {key:?} must be a nonnegative integer")))
    };
    let mut c = CandidateClasses::default();
    for (name, x) in obj {
        match name.as_str() {
            "rational" => c.rational = Some(bound(x, "bound")?),
            "cyclotomic" => {
                c.cyclotomic = Some(u32::try_from(bound(x, "max_order")?).map_err(|_| bad("max_order too large"))?)
            }
            "quadratic" => {
                let height = bound(x, "height")?;
                c.quadratic = Some(match x.get("d") {
                    Some(ds) => QuadraticClass {
                        discriminants: ds
                            .as_array()
                            .and_then(|ds| ds.iter().map(Value::as_i64).collect::<Option<Vec<_>>>())
                            .ok_or_else(|| bad("quadratic \"d\" must be a list of integers"))?,
                        height,
                    },
                    None => QuadraticClass::up_to(bound(x, "max_d")?, height),
                });
            }
            "custom" => {
                c.custom = Some(CustomClass {
                    degree: u32::try_from(bound(x, "degree")?).map_err(|_| bad("degree too large"))?,
                    coeff: bound(x, "coeff")?,
                });
            }
            other => return Err(bad(&format!("unknown candidate class {other:?}"))),
        }
    }
    c.validate()?;
    Ok(c)
}

/// A point whose heights were evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit {
    /// Position in the candidate stream.
    pub index: usize,
    pub point: PointSpec,
    pub heights: Vec<GvfValue>,
    /// max_i |h_i - r_i| as a ball.
    pub max_deviation: BigFloat,
}

fn point_json(p: &PointSpec) -> Value {
    json!({"field": field_to_json(&p.carrier), "coords": p.to_json()})
}

fn render_point(p: &PointSpec) -> String {
    let coords: Vec<String> = p.coords.iter().map(|(k, v)| format!("{k} = {}", p.carrier.render(v))).collect();
    format!("{} over {}", coords.join(", "), p.carrier)
}

impl Hit {
    pub fn to_json(&self) -> Value {
        json!({
            "index": self.index,
            "point": point_json(&self.point),
            "heights": self.heights.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "max_deviation": self.max_deviation.display_with(30),
        })
    }

    pub fn describe(&self) -> String {
        render_point(&self.point)
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best: Hit,
    pub hits: Vec<Hit>,
    /// Candidates looked at, including filtered and skipped ones.
    pub examined: usize,
    /// Rejected by the equations, the inequation or a template support.
    pub filtered: usize,
    /// Not evaluable by this implementation (unsupported ramification or
    /// precision exhausted).
    pub skipped: usize,
    pub wall_time: Duration,
}

impl SearchResult {
    /// The result document. Wall time is left out so that the document is
    /// reproducible.
    pub fn to_json(&self) -> Value {
        json!({
            "schema": "gvf.search-result/1",
            "best": self.best.to_json(),
            "hits": self.hits.iter().map(Hit::to_json).collect::<Vec<_>>(),
            "examined": self.examined,
            "filtered": self.filtered,
            "skipped": self.skipped,
        })
    }
}

enum Outcome {
    Filtered,
    Skipped,
    Evaluated(Vec<GvfValue>),
}

fn point_of(vars: &[String], t: &Tuple) -> PointSpec {
    PointSpec::new(t.carrier.clone(), vars.iter().cloned().zip(t.elems.iter().cloned()))
}

/// Whether `e` vanishes at the point; `None` when it is undefined there.
fn vanishes(e: &Expr, x: &PointSpec) -> Option<bool> {
    let v = e.eval(&x.carrier, &|name| x.coords.get(name).cloned()).ok()?;
    Some(x.carrier.is_zero(&v))
}

fn heights(templates: &[&Template], x: &PointSpec, prec: u32) -> Result<Outcome> {
    let gvf = Gvf::new(x.carrier.clone()).with_precision(prec).with_execution(Execution::Sequential);
    let mut hs = Vec::with_capacity(templates.len());
    for t in templates {
        match height_at_point(&gvf, t, x) {
            Ok(h) => hs.push(h),
            Err(Error::PointOnSupport { .. }) => return Ok(Outcome::Filtered),
            Err(Error::UnsupportedRamification { .. } | Error::PrecisionExhausted) => return Ok(Outcome::Skipped),
            Err(e) => return Err(e),
        }
    }
    Ok(Outcome::Evaluated(hs))
}

fn evaluate(inst: &SearchInstance, templates: &[&Template], x: &PointSpec) -> Result<Outcome> {
    for g in &inst.equations {
        if vanishes(g, x) != Some(true) {
            return Ok(Outcome::Filtered);
        }
    }
    if let Some((h, _)) = &inst.inequation {
        if vanishes(h, x) != Some(false) {
            return Ok(Outcome::Filtered);
        }
    }
    heights(templates, x, inst.precision)
}

fn max_deviation(hs: &[GvfValue], targets: &[HeightTarget]) -> BigFloat {
    hs.iter()
        .zip(targets)
        .map(|(h, t)| h.rendered().sub(&t.target).abs())
        .reduce(|a, b| a.max(&b))
        .expect("at least one template")
}

/// A hit clears epsilon by more than the tracked radius.
pub fn is_hit(deviation: &BigFloat, epsilon: &Rat) -> bool {
    deviation.upper_rat() < *epsilon
}

/// Scan the candidates for points whose heights are within epsilon of the
/// targets.
pub fn approximate(inst: &SearchInstance) -> Result<SearchResult> {
    let start = Instant::now();
    inst.validate()?;
    let vars = inst.variables();
    let tuples = enumerate_tuples(&inst.classes, vars.len(), inst.seed)?;
    let exec = Execution::from_threads(inst.threads);
    let templates: Vec<&Template> = inst.templates.iter().map(|t| &t.template).collect();
    let (mut filtered, mut skipped, mut examined) = (0, 0, 0);
    let mut best: Option<Hit> = None;
    let mut hits = Vec::new();
    'scan: for (b, block) in tuples.chunks(BLOCK).enumerate() {
        let outcomes = exec.map(block, |t| {
            let x = point_of(&vars, t);
            evaluate(inst, &templates, &x).map(|o| (x, o))
        });
        for (i, r) in outcomes.into_iter().enumerate() {
            let index = b * BLOCK + i;
            examined = index + 1;
            let (point, heights) = match r? {
                (_, Outcome::Filtered) => {
                    filtered += 1;
                    continue;
                }
                (_, Outcome::Skipped) => {
                    skipped += 1;
                    continue;
                }
                (x, Outcome::Evaluated(hs)) => (x, hs),
            };
            let dev = max_deviation(&heights, &inst.templates);
            let hit = Hit { index, point, heights, max_deviation: dev };
            let is_h = is_hit(&hit.max_deviation, &inst.epsilon);
            if best.as_ref().is_none_or(|b| hit.max_deviation.cmp_mid(&b.max_deviation).is_lt()) {
                best = Some(hit.clone());
            }
            if is_h {
                hits.push(hit);
                if inst.mode == Mode::First {
                    break 'scan;
                }
            }
        }
    }
    let best = best.ok_or(Error::NoCandidateSatisfiesEquations)?;
    Ok(SearchResult { best, hits, examined, filtered, skipped, wall_time: start.elapsed() })
}

/// Input of the essential infimum estimate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaInstance {
    pub template: Template,
    /// Polynomials whose zero sets are omitted.
    pub exclusions: Vec<Expr>,
    pub exclusion_sources: Vec<String>,
    pub classes: CandidateClasses,
    pub seed: u64,
    pub threads: usize,
    pub precision: u32,
}

impl ZetaInstance {
    pub fn new(template: Template, classes: CandidateClasses) -> Self {
        ZetaInstance {
            template,
            exclusions: Vec::new(),
            exclusion_sources: Vec::new(),
            classes,
            seed: 0,
            threads: 0,
            precision: DEFAULT_PRECISION,
        }
    }

    pub fn excluding(mut self, polys: &[&str]) -> Result<Self> {
        for p in polys {
            self.exclusions.push(parse_poly(p)?);
            self.exclusion_sources.push(p.to_string());
        }
        Ok(self)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "gvf.zeta/1",
            "template": self.template.to_json(),
            "exclusions": self.exclusion_sources,
            "classes": classes_to_json(&self.classes),
            "seed": self.seed,
            "threads": self.threads,
            "precision": self.precision,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let t = v.get("template").ok_or_else(|| Error::InvalidInstance("missing \"template\"".into()))?;
        let classes =
            classes_from_json(v.get("classes").ok_or_else(|| Error::InvalidInstance("missing \"classes\"".into()))?)?;
        let ex = strings(v, "exclusions")?;
        let mut z = ZetaInstance::new(Template::from_json(t)?, classes)
            .excluding(&ex.iter().map(String::as_str).collect::<Vec<_>>())?;
        z.seed = uint(v, "seed")?.unwrap_or(0);
        z.threads = uint(v, "threads")?.unwrap_or(0) as usize;
        z.precision = uint(v, "precision")?.map_or(DEFAULT_PRECISION, |p| p as u32);
        Ok(z)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub index: usize,
    pub point: PointSpec,
    pub height: GvfValue,
}

impl TraceEntry {
    pub fn to_json(&self) -> Value {
        json!({"index": self.index, "point": point_json(&self.point), "height": self.height.to_string()})
    }

    pub fn describe(&self) -> String {
        render_point(&self.point)
    }
}

/// A running minimum of the height. The estimate is an upper bound for the
/// infimum over the enumerated family, not the infimum itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaEstimate {
    pub trace: Vec<TraceEntry>,
    /// `None` when every candidate was excluded.
    pub estimate: Option<GvfValue>,
    pub examined: usize,
    pub excluded: usize,
    pub skipped: usize,
}

impl ZetaEstimate {
    pub fn witness(&self) -> Option<&TraceEntry> {
        self.trace.last()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "gvf.zeta-result/1",
            "estimate": self.estimate.as_ref().map(ToString::to_string),
            "bound": "upper",
            "witness": self.witness().map(TraceEntry::to_json),
            "trace_length": self.trace.len(),
            "examined": self.examined,
            "excluded": self.excluded,
            "skipped": self.skipped,
        })
    }
}

pub fn zeta_estimate(inst: &ZetaInstance) -> Result<ZetaEstimate> {
    let vars = {
        let mut vs: std::collections::BTreeSet<String> = inst.template.variables().into_iter().collect();
        for e in &inst.exclusions {
            vs.extend(e.vars());
        }
        vs.into_iter().collect::<Vec<_>>()
    };
    let tuples = enumerate_tuples(&inst.classes, vars.len(), inst.seed)?;
    let exec = Execution::from_threads(inst.threads);
    let outcomes = exec.map(&tuples, |t| {
        let x = point_of(&vars, t);
        if inst.exclusions.iter().any(|e| vanishes(e, &x) != Some(false)) {
            return Ok((x, Outcome::Filtered));
        }
        heights(&[&inst.template], &x, inst.precision).map(|o| (x, o))
    });
    let mut z = ZetaEstimate { trace: Vec::new(), estimate: None, examined: tuples.len(), excluded: 0, skipped: 0 };
    for (index, r) in outcomes.into_iter().enumerate() {
        match r? {
            (_, Outcome::Filtered) => z.excluded += 1,
            (_, Outcome::Skipped) => z.skipped += 1,
            (point, Outcome::Evaluated(mut hs)) => {
                let height = hs.pop().expect("one template");
                let lower = match &z.estimate {
                    None => true,
                    Some(cur) => height.rendered().cmp_mid(&cur.rendered()).is_lt(),
                };
                if lower {
                    z.estimate = Some(height.clone());
                    z.trace.push(TraceEntry { index, point, height });
                }
            }
        }
    }
    Ok(z)
}

/// Minimize the functional `-> template` over the feasibility polytope
/// spanned by the places of the rational points among `points`, with
/// generator 2 prepended. By positivity the minimum is >= -epsilon, and it
/// is at most (within epsilon) the height at each included point.
pub fn lp_minimum(template: &Template, points: &[PointSpec], epsilon: Rat) -> Result<FeasibilityReport> {
    let mut sources = vec!["2".to_string()];
    sources.extend(template.sources.iter().cloned());
    let generators = sources.iter().map(|s| parse_poly(s)).collect::<Result<Vec<_>>>()?;
    let mut atoms = Vec::new();
    for p in points.iter().filter(|p| p.carrier == Carrier::Rationals) {
        let coords: BTreeMap<String, Rat> =
            p.coords.iter().map(|(k, v)| (k.clone(), v.rat().expect("rational point").clone())).collect();
        match atoms_at_point(&generators, &coords) {
            Ok(a) => atoms.extend(a),
            Err(Error::PointOnSupport { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let inst = FeasibilityInstance {
        generators,
        generator_sources: sources,
        divisors: Vec::new(),
        atoms,
        epsilon,
        normalization: crate::algebra::LogLinear::log_prime(2u32.into(), Rat::from_integer(1.into())),
        objective: None,
    };
    minimize_functional(&inst, &template.term.shift(1))
}
