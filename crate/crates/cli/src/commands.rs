//! One function per subcommand. Each returns the stdout lines in the
//! requested mode and whether the verdict holds.

use gvf_core::algebra::{parse_rat, BigFloat, Rat, DEFAULT_PRECISION};
use gvf_core::divisors::{
    divisor_from_json, divisor_to_json, functional_value, height_at_point, is_effective_on_support, Effectivity,
    Evidence, LatticeDivisor, PointSpec, Template,
};
use gvf_core::exec::Execution;
use gvf_core::feasibility::{minimize_functional, solve_feasible, FeasibilityInstance, FeasibilityReport, Verdict};
use gvf_core::gvf::{Gvf, GvfValue, Positivity};
use gvf_core::places::encoding::{elem_to_json, field_to_json, parse_elem_list, parse_elem_str, parse_field_str};
use gvf_core::places::{valuations, Carrier, FieldElem};
use gvf_core::search::{approximate, zeta_estimate, CandidateClasses, Mode, SearchInstance, ZetaInstance};
use gvf_core::tropical::{self, TropTerm};
use gvf_core::{Error, Result};
use serde_json::{json, Value};

use crate::{CheckCommand, Cli, Command, DivisorCommand, Report};

struct Ctx<'a> {
    cli: &'a Cli,
    carrier: Carrier,
    gvf: Gvf,
}

impl Ctx<'_> {
    fn report(&self, doc: Value, human: Vec<String>, ok: bool) -> Report {
        let lines = if self.cli.json { vec![doc.to_string()] } else { human };
        Report { lines, ok }
    }

    fn elems(&self, text: &str) -> Result<Vec<FieldElem>> {
        parse_elem_list(&self.carrier, text)
    }

    fn elems_json(&self, a: &[FieldElem]) -> Value {
        Value::Array(a.iter().map(|x| elem_to_json(&self.carrier, x)).collect())
    }

    fn field_json(&self) -> Value {
        field_to_json(&self.carrier)
    }
}

pub fn dispatch(cli: &Cli) -> Result<Report> {
    let carrier = parse_field_str(&cli.field)?;
    let exec = cli.threads.map_or(Execution::default(), Execution::from_threads);
    let gvf = Gvf::new(carrier.clone()).with_precision(precision(cli)?).with_execution(exec);
    let ctx = Ctx { cli, carrier, gvf };
    match &cli.command {
        Command::Eval { expr, args } => eval(&ctx, expr, args),
        Command::Height { elem } => height(&ctx, elem),
        Command::Places { elem } => places(&ctx, elem),
        Command::Check { check } => check_cmd(&ctx, check),
        Command::Divisor { op } => divisor_cmd(&ctx, op),
        Command::PointHeight { template, args } => point_height(&ctx, template, args),
        Command::Feasible { instance, eps } => feasible(&ctx, instance, eps.as_deref(), None, false),
        Command::Minimize { instance, expr, eps } => feasible(&ctx, instance, eps.as_deref(), expr.as_deref(), true),
        Command::Search { instance, eps, bound, mode, timing } => {
            search(&ctx, instance, eps.as_deref(), *bound, mode.as_deref(), *timing)
        }
        Command::Zeta { instance, template, bound } => zeta(&ctx, instance.as_deref(), template.as_deref(), *bound),
    }
}

fn precision(cli: &Cli) -> Result<u32> {
    match cli.precision {
        None => Ok(DEFAULT_PRECISION),
        Some(p) if (32..=1 << 16).contains(&p) => Ok(p),
        Some(p) => Err(Error::InvalidInstance(format!("precision {p} must lie in 32..=65536 bits"))),
    }
}

fn term(text: &str) -> Result<TropTerm> {
    Ok(tropical::parse(text)?)
}

fn rat_arg(text: &str, what: &str) -> Result<Rat> {
    parse_rat(text).ok_or_else(|| Error::InvalidInstance(format!("{what}: bad number {text:?}")))
}

/// A value with its decimal rendering, radius and, when exact, symbolic form.
pub fn value_json(v: &GvfValue) -> Value {
    let r = v.rendered();
    json!({
        "decimal": r.display_with(30),
        "radius": r.radius().to_sci_upper(),
        "exact": v.is_exact(),
        "symbolic": if v.is_exact() { Some(v.exact.to_string()) } else { None },
        "finite_part": v.exact.to_string(),
    })
}

/// Zero: exact part identically zero and the ball around 0.
fn vanishes(v: &GvfValue) -> bool {
    v.exact.is_zero() && v.arch.contains_zero()
}

fn eval(ctx: &Ctx, expr: &str, args: &str) -> Result<Report> {
    let t = term(expr)?;
    let a = ctx.elems(args)?;
    let v = ctx.gvf.r_t(&t, &a)?;
    let doc = json!({
        "schema": "gvf.eval/1",
        "field": ctx.field_json(),
        "expr": t.to_string(),
        "args": ctx.elems_json(&a),
        "value": value_json(&v),
    });
    Ok(ctx.report(doc, vec![v.to_string()], true))
}

fn height(ctx: &Ctx, elem: &str) -> Result<Report> {
    let a = parse_elem_str(&ctx.carrier, elem)?;
    let v = ctx.gvf.height(&a)?;
    let doc = json!({
        "schema": "gvf.height/1",
        "field": ctx.field_json(),
        "elem": elem_to_json(&ctx.carrier, &a),
        "value": value_json(&v),
    });
    Ok(ctx.report(doc, vec![v.to_string()], true))
}

fn table(header: &[String], rows: &[Vec<String>]) -> Vec<String> {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> =
            cells.iter().zip(&width).map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = vec![line(header)];
    out.extend(rows.iter().map(|r| line(r)));
    out
}

fn places(ctx: &Ctx, elem: &str) -> Result<Report> {
    let a = ctx.elems(elem)?;
    let ps = ctx.gvf.support(&a)?;
    let prec = ctx.gvf.precision();
    let mut rows = Vec::new();
    let mut docs = Vec::new();
    for p in &ps {
        let vals = valuations(&ctx.carrier, p, &a, prec)?;
        let vs: Vec<String> = vals.iter().map(ToString::to_string).collect();
        docs.push(json!({
            "label": p.label(),
            "archimedean": p.is_archimedean(),
            "weight": p.weight().to_string(),
            "values": vs,
        }));
        let mut row = vec![p.label(), p.weight().to_string()];
        row.extend(vs);
        rows.push(row);
    }
    let mut header = vec!["place".to_string(), "weight".to_string()];
    header.extend(a.iter().map(|x| format!("v({})", ctx.carrier.render(x))));
    let doc = json!({"schema": "gvf.places/1", "field": ctx.field_json(), "elems": ctx.elems_json(&a), "places": docs});
    Ok(ctx.report(doc, table(&header, &rows), true))
}

fn check_doc(ctx: &Ctx, check: &str, a: &[FieldElem], expr: Option<String>, residuals: &[GvfValue], holds: bool, detail: String) -> Value {
    json!({
        "schema": "gvf.check/1",
        "check": check,
        "field": ctx.field_json(),
        "elems": ctx.elems_json(a),
        "expr": expr,
        "residuals": residuals.iter().map(value_json).collect::<Vec<_>>(),
        "holds": holds,
        "detail": detail,
    })
}

fn check_cmd(ctx: &Ctx, c: &CheckCommand) -> Result<Report> {
    let (name, a, expr, residuals, holds, detail) = match c {
        CheckCommand::Product { elem } => {
            let a = parse_elem_str(&ctx.carrier, elem)?;
            let r = ctx.gvf.check_product_formula(&a)?;
            let holds = vanishes(&r);
            ("product", vec![a], None, vec![r.clone()], holds, format!("residual {r}"))
        }
        CheckCommand::Linearity { expr, expr2, alpha, args } => {
            let (t1, t2) = (term(expr)?, term(expr2)?);
            let q = rat_arg(alpha, "alpha")?;
            let a = ctx.elems(args)?;
            let (add, hom) = ctx.gvf.check_linearity(&t1, &t2, &q, &a)?;
            let holds = vanishes(&add) && vanishes(&hom);
            let detail = format!("additivity residual {add}; homogeneity residual {hom}");
            ("linearity", a, Some(format!("{t1}; {t2}; alpha = {q}")), vec![add, hom], holds, detail)
        }
        CheckCommand::Positivity { expr, args } => {
            let t = term(expr)?;
            let a = ctx.elems(args)?;
            let (residuals, holds, detail) = match ctx.gvf.check_positivity(&t, &a)? {
                Positivity::Nonnegative { value } => {
                    let d = format!("premise holds, integral {value} >= 0");
                    (vec![value], true, d)
                }
                Positivity::Violation { value } => {
                    let d = format!("premise holds but integral {value} < 0");
                    (vec![value], false, d)
                }
                Positivity::PremiseFails { witness, local_value } => {
                    (vec![], true, format!("premise fails at {witness}: t(v(a)) = {local_value}"))
                }
            };
            ("positivity", a, Some(t.to_string()), residuals, holds, detail)
        }
        CheckCommand::Galois { expr, args } => {
            let t = term(expr)?;
            let a = ctx.elems(args)?;
            if ctx.carrier.quadratic_d().is_none() {
                return Err(Error::InvalidField("the command line checks Galois invariance over quadratic fields".into()));
            }
            let b = a.iter().map(|x| ctx.carrier.conjugate(x)).collect::<Result<Vec<_>>>()?;
            let r = ctx.gvf.check_galois_invariance(&t, &a, &b)?;
            let holds = vanishes(&r);
            ("galois", a, Some(t.to_string()), vec![r.clone()], holds, format!("R_t(a) - R_t(conjugate) = {r}"))
        }
    };
    let status = if holds { "holds" } else { "FAILS" };
    let human = vec![format!("{name}: {status}"), detail.clone()];
    let doc = check_doc(ctx, name, &a, expr, &residuals, holds, detail);
    Ok(ctx.report(doc, human, holds))
}

fn parse_json(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInstance(format!("{what}: {e}")))
}

fn divisor_arg(ctx: &Ctx, text: &str) -> Result<LatticeDivisor> {
    divisor_from_json(&ctx.carrier, &parse_json(text, "divisor")?)
}

fn divisor_doc(ctx: &Ctx, op: &str, d: &LatticeDivisor) -> Value {
    json!({
        "schema": "gvf.divisor/1",
        "op": op,
        "field": ctx.field_json(),
        "divisor": divisor_to_json(&ctx.carrier, d),
        "value": Value::Null,
        "effective": Value::Null,
        "evidence": Value::Null,
        "witness": Value::Null,
        "beta": Value::Null,
    })
}

fn divisor_cmd(ctx: &Ctx, op: &DivisorCommand) -> Result<Report> {
    match op {
        DivisorCommand::Eval { divisor } => {
            let d = divisor_arg(ctx, divisor)?;
            let v = functional_value(&ctx.gvf, &d)?;
            let mut doc = divisor_doc(ctx, "eval", &d);
            doc["value"] = value_json(&v);
            Ok(ctx.report(doc, vec![v.to_string()], true))
        }
        DivisorCommand::Effective { divisor } => {
            let d = divisor_arg(ctx, divisor)?;
            let mut doc = divisor_doc(ctx, "effective", &d);
            let (ok, human) = match is_effective_on_support(&ctx.gvf, &d)? {
                Effectivity::Effective { evidence } => {
                    let ev = match evidence {
                        Evidence::Proven => "proven",
                        Evidence::Sampled => "sampled",
                    };
                    doc["evidence"] = json!(ev);
                    (true, format!("effective ({ev})"))
                }
                Effectivity::NotEffective { witness, beta } => {
                    doc["witness"] = json!(witness.label());
                    doc["beta"] = json!(beta.to_string());
                    (false, format!("not effective: beta({witness}, D) = {beta}"))
                }
            };
            doc["effective"] = json!(ok);
            Ok(ctx.report(doc, vec![human], ok))
        }
        DivisorCommand::Wedge { divisor } => {
            let ds = divisor.iter().map(|d| divisor_arg(ctx, d)).collect::<Result<Vec<_>>>()?;
            let w = ds[1..].iter().fold(ds[0].clone(), |acc, d| acc.wedge(d));
            let doc = divisor_doc(ctx, "wedge", &w);
            let human = divisor_to_json(&ctx.carrier, &w).to_string();
            Ok(ctx.report(doc, vec![human], true))
        }
    }
}

/// A point given as a JSON object or as `y=2,z=1/3`.
fn point_arg(k: &Carrier, text: &str) -> Result<PointSpec> {
    let t = text.trim();
    if t.starts_with('{') {
        return PointSpec::from_json(k, &parse_json(t, "point")?);
    }
    let mut coords = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes: Vec<char> = t.chars().collect();
    let mut parts = Vec::new();
    for (i, c) in bytes.iter().enumerate() {
        match c {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(bytes[start..i].iter().collect::<String>());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(bytes[start..].iter().collect::<String>());
    for p in parts {
        let (name, value) = p
            .split_once('=')
            .ok_or_else(|| Error::InvalidElement(format!("point coordinate {p:?} is not name=value")))?;
        coords.push((name.trim().to_string(), parse_elem_str(k, value.trim())?));
    }
    Ok(PointSpec::new(k.clone(), coords))
}

fn point_height(ctx: &Ctx, template: &str, args: &str) -> Result<Report> {
    let t = Template::from_json(&parse_json(template, "template")?)?;
    let x = point_arg(&ctx.carrier, args)?;
    let v = height_at_point(&ctx.gvf, &t, &x)?;
    let doc = json!({
        "schema": "gvf.point-height/1",
        "field": ctx.field_json(),
        "template": t.to_json(),
        "point": x.to_json(),
        "value": value_json(&v),
    });
    Ok(ctx.report(doc, vec![v.to_string()], true))
}

fn load(text: &str) -> Result<Value> {
    let t = text.trim();
    if t.starts_with('{') {
        return parse_json(t, "instance");
    }
    let body = std::fs::read_to_string(t).map_err(|e| Error::InvalidInstance(format!("cannot read {t:?}: {e}")))?;
    parse_json(&body, t)
}

fn decimal(q: &Rat) -> String {
    BigFloat::from_rat(q, 192).display_with(30)
}

fn feasibility_doc(r: &FeasibilityReport, minimize: bool) -> Value {
    let (verdict, weights, certificate) = match &r.verdict {
        Verdict::Feasible { weights } => {
            ("feasible", Some(weights.iter().map(ToString::to_string).collect::<Vec<_>>()), Value::Null)
        }
        Verdict::Infeasible { certificate } => (
            "infeasible",
            None,
            json!({
                "multipliers": certificate.multipliers.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "violation_bound": certificate.violation_bound.to_string(),
            }),
        ),
    };
    json!({
        "schema": "gvf.feasibility/1",
        "task": if minimize { "minimize" } else { "feasible" },
        "verdict": verdict,
        "weights": weights,
        "certificate": certificate,
        "objective": r.objective.as_ref().map(ToString::to_string),
        "objective_decimal": r.objective.as_ref().map(decimal),
        "perturbation_bound": r.perturbation_bound.to_string(),
        "precision_bits": r.precision_bits,
    })
}

fn feasible(ctx: &Ctx, instance: &str, eps: Option<&str>, expr: Option<&str>, minimize: bool) -> Result<Report> {
    let mut doc = load(instance)?;
    if let Some(e) = eps {
        let e = rat_arg(e, "eps")?;
        if let Some(obj) = doc.as_object_mut() {
            obj.insert("epsilon".into(), json!(e.to_string()));
        }
    }
    let inst = FeasibilityInstance::from_json(&doc)?;
    let report = if minimize {
        let t = match expr {
            Some(e) => term(e)?,
            None => inst
                .objective
                .clone()
                .ok_or_else(|| Error::InvalidInstance("minimize needs --expr or an instance \"objective\"".into()))?,
        };
        minimize_functional(&inst, &t)?
    } else {
        solve_feasible(&inst)?
    };
    let mut human = Vec::new();
    match &report.verdict {
        Verdict::Feasible { weights } => {
            human.push("feasible".to_string());
            let rows: Vec<Vec<String>> = report
                .labels
                .iter()
                .zip(weights)
                .filter(|(_, w)| !num_traits::Zero::is_zero(*w))
                .map(|(l, w)| vec![l.clone(), w.to_string()])
                .collect();
            if !rows.is_empty() {
                human.extend(table(&["atom".to_string(), "weight".to_string()], &rows));
            }
        }
        Verdict::Infeasible { certificate } => {
            human.push("infeasible".to_string());
            human.push(format!(
                "certificate with {} nonzero multipliers; some constraint is violated by at least {}",
                certificate.multipliers.iter().filter(|y| !num_traits::Zero::is_zero(*y)).count(),
                certificate.violation_bound
            ));
        }
    }
    if let Some(v) = &report.objective {
        human.push(format!("minimum {v} = {}", decimal(v)));
    }
    human.push(format!("perturbation bound {} at {} bits", report.perturbation_bound, report.precision_bits));
    let ok = report.is_feasible();
    Ok(ctx.report(feasibility_doc(&report, minimize), human, ok))
}

fn search(
    ctx: &Ctx,
    instance: &str,
    eps: Option<&str>,
    bound: Option<u64>,
    mode: Option<&str>,
    timing: bool,
) -> Result<Report> {
    let mut inst = SearchInstance::from_json(&load(instance)?)?;
    if let Some(e) = eps {
        inst.epsilon = rat_arg(e, "eps")?;
    }
    if let Some(b) = bound {
        inst.classes.rational = Some(b);
    }
    if let Some(m) = mode {
        inst.mode = m.parse::<Mode>()?;
    }
    apply_common(ctx, &mut inst.seed, &mut inst.threads, &mut inst.precision);
    inst.validate()?;
    let r = approximate(&inst)?;
    let lines = if ctx.cli.json {
        let mut lines: Vec<String> = r
            .hits
            .iter()
            .map(|h| {
                let mut d = h.to_json();
                d["schema"] = json!("gvf.search-hit/1");
                d.to_string()
            })
            .collect();
        lines.push(r.to_json().to_string());
        lines
    } else {
        let mut rows = Vec::new();
        for h in &r.hits {
            rows.push(vec![h.index.to_string(), h.describe(), h.max_deviation.display_with(12)]);
        }
        let mut out = vec![format!(
            "examined {} candidates ({} filtered, {} skipped); {} within eps",
            r.examined,
            r.filtered,
            r.skipped,
            r.hits.len()
        )];
        if timing {
            out.push(format!("wall time {:.2?}", r.wall_time));
        }
        if !rows.is_empty() {
            out.extend(table(&["index".into(), "point".into(), "max deviation".into()], &rows));
        }
        out.push(format!("best: {} with deviation {}", r.best.describe(), r.best.max_deviation.display_with(12)));
        for (t, h) in inst.templates.iter().zip(&r.best.heights) {
            out.push(format!("  target {}: height {h}", t.source));
        }
        out
    };
    Ok(Report { lines, ok: !r.hits.is_empty() })
}

fn apply_common(ctx: &Ctx, seed: &mut u64, threads: &mut usize, precision: &mut u32) {
    if let Some(s) = ctx.cli.seed {
        *seed = s;
    }
    if let Some(t) = ctx.cli.threads {
        *threads = t;
    }
    if ctx.cli.precision.is_some() {
        *precision = ctx.gvf.precision();
    }
}

fn zeta(ctx: &Ctx, instance: Option<&str>, template: Option<&str>, bound: Option<u64>) -> Result<Report> {
    let mut inst = match (instance, template) {
        (Some(i), _) => ZetaInstance::from_json(&load(i)?)?,
        (None, Some(t)) => {
            let t = Template::from_json(&parse_json(t, "template")?)?;
            ZetaInstance::new(t, CandidateClasses::rational(bound.unwrap_or(10)))
        }
        (None, None) => return Err(Error::InvalidInstance("zeta needs --instance or --template".into())),
    };
    if let Some(b) = bound {
        inst.classes.rational = Some(b);
    }
    apply_common(ctx, &mut inst.seed, &mut inst.threads, &mut inst.precision);
    let z = zeta_estimate(&inst)?;
    let lines = if ctx.cli.json {
        let mut lines: Vec<String> = z
            .trace
            .iter()
            .map(|e| {
                let mut d = e.to_json();
                d["schema"] = json!("gvf.zeta-trace/1");
                d.to_string()
            })
            .collect();
        lines.push(z.to_json().to_string());
        lines
    } else {
        let rows: Vec<Vec<String>> =
            z.trace.iter().map(|e| vec![e.index.to_string(), e.describe(), e.height.to_string()]).collect();
        let mut out = table(&["index".into(), "point".into(), "height".into()], &rows);
        out.push(match &z.estimate {
            Some(v) => format!("estimate (upper bound over the candidates): {v}"),
            None => "every candidate was excluded".to_string(),
        });
        out.push(format!("examined {} ({} excluded, {} skipped)", z.examined, z.excluded, z.skipped));
        out
    };
    Ok(Report { lines, ok: z.estimate.is_some() })
}
