//! JSON encodings of carriers and elements.
//!
//! Fields: `{"type":"Q"}`, `{"type":"quadratic","d":-1}`,
//! `{"type":"number_field","min_poly":[-2,0,1]}` (optionally `"trusted":true`),
//! `{"type":"function_field","p":7}`.
//!
//! Elements: a string in the expression syntax (`"12/35"`, `"1+sqrt(2)"`,
//! `"t^2+1"`), `{"a":"1/2","b":"3"}` for a + b sqrt(d),
//! `{"coeffs":["0","1"]}` in the power basis, `{"num":"t^3+2*t","den":"t+1"}`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use super::carrier::{Carrier, FieldElem};
use super::expr::parse_element;
use crate::algebra::{parse_rat, Poly, Rat};
use crate::error::{Error, Result};

fn int_of(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

pub fn parse_field(v: &Value) -> Result<Carrier> {
    let bad = |m: &str| Error::InvalidField(m.to_string());
    let ty = v.get("type").and_then(Value::as_str).ok_or_else(|| bad("missing \"type\""))?;
    match ty {
        "Q" => Ok(Carrier::Rationals),
        "quadratic" => {
            let d = v.get("d").and_then(int_of).ok_or_else(|| bad("quadratic field needs integer \"d\""))?;
            Carrier::quadratic(d)
        }
        "number_field" => {
            let coeffs = v
                .get("min_poly")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("number_field needs \"min_poly\" array"))?;
            let coeffs: Option<Vec<BigInt>> = coeffs.iter().map(int_of).collect();
            let coeffs = coeffs.ok_or_else(|| bad("min_poly coefficients must be integers"))?;
            let trusted = v.get("trusted").and_then(Value::as_bool).unwrap_or(false);
            let f = Poly::new(coeffs);
            // degree-2 x^2 - d is routed to the quadratic machinery
            if f.degree() == Some(2) && f.is_monic() && f.coeff(1).is_zero() {
                if let Ok(k) = Carrier::quadratic(-f.coeff(0)) {
                    return Ok(k);
                }
            }
            Carrier::number_field(f, trusted)
        }
        "function_field" => {
            let p = v.get("p").and_then(Value::as_u64).ok_or_else(|| bad("function_field needs integer \"p\""))?;
            Carrier::function_field(p)
        }
        other => Err(bad(&format!("unknown field type {other:?}"))),
    }
}

pub fn parse_field_str(text: &str) -> Result<Carrier> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::InvalidField(e.to_string()))?;
    parse_field(&v)
}

fn int_json(n: &BigInt) -> Value {
    n.to_i64().map_or_else(|| Value::from(n.to_string()), Value::from)
}

pub fn field_to_json(k: &Carrier) -> Value {
    match k {
        Carrier::Rationals => json!({"type": "Q"}),
        Carrier::Quadratic(_) => json!({"type": "quadratic", "d": int_json(k.quadratic_d().unwrap())}),
        Carrier::NumberField(a) => json!({
            "type": "number_field",
            "min_poly": a.min_poly().coeffs().iter().map(int_json).collect::<Vec<_>>(),
        }),
        Carrier::FunctionField(p) => json!({"type": "function_field", "p": p}),
    }
}

fn rat_of(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s).ok_or_else(|| Error::InvalidElement(format!("bad rational {s:?}"))),
        Value::Number(n) => parse_rat(&n.to_string()).ok_or_else(|| Error::InvalidElement(n.to_string())),
        other => Err(Error::InvalidElement(format!("bad rational {other}"))),
    }
}

fn rat_field(v: &Value, key: &str) -> Result<Rat> {
    v.get(key).map_or_else(|| Ok(Rat::zero()), rat_of)
}

pub fn parse_elem(k: &Carrier, v: &Value) -> Result<FieldElem> {
    let a = match v {
        Value::String(s) => parse_element(k, s)?,
        Value::Number(n) => parse_element(k, &n.to_string())?,
        Value::Object(o) if o.contains_key("coeffs") => {
            let arr = o["coeffs"].as_array().ok_or_else(|| Error::InvalidElement("coeffs must be an array".into()))?;
            if k.algebraic().is_none() {
                return Err(Error::CarrierMismatch);
            }
            if arr.len() > k.degree() {
                return Err(Error::InvalidElement(format!("expected at most {} coefficients", k.degree())));
            }
            let mut c = vec![Rat::zero(); k.degree()];
            for (i, x) in arr.iter().enumerate() {
                c[i] = rat_of(x)?;
            }
            FieldElem::Alg(c)
        }
        Value::Object(o) if o.contains_key("a") || o.contains_key("b") => {
            if k.quadratic_d().is_none() {
                return Err(Error::CarrierMismatch);
            }
            FieldElem::Alg(vec![rat_field(v, "a")?, rat_field(v, "b")?])
        }
        Value::Object(o) if o.contains_key("num") => {
            if !k.is_function_field() {
                return Err(Error::CarrierMismatch);
            }
            let text = |key: &str| match o.get(key) {
                Some(Value::String(s)) => Ok(s.clone()),
                Some(Value::Number(n)) => Ok(n.to_string()),
                None => Ok("1".to_string()),
                Some(other) => Err(Error::InvalidElement(format!("bad polynomial {other}"))),
            };
            let num = parse_element(k, &text("num")?)?;
            let den = parse_element(k, &text("den")?)?;
            k.div(&num, &den)?
        }
        other => return Err(Error::InvalidElement(format!("unrecognized element {other}"))),
    };
    k.normalize(&a)
}

/// Parse a single element given on the command line: JSON when it starts
/// with `{` or `"`, the expression syntax otherwise.
pub fn parse_elem_str(k: &Carrier, text: &str) -> Result<FieldElem> {
    let t = text.trim();
    if t.starts_with('{') || t.starts_with('"') {
        let v: Value = serde_json::from_str(t).map_err(|e| Error::InvalidElement(e.to_string()))?;
        parse_elem(k, &v)
    } else {
        parse_element(k, t)
    }
}

/// A tuple of elements: a JSON array, or comma-separated items (commas
/// inside parentheses or braces do not split).
pub fn parse_elem_list(k: &Carrier, text: &str) -> Result<Vec<FieldElem>> {
    let t = text.trim();
    if t.starts_with('[') {
        let v: Value = serde_json::from_str(t).map_err(|e| Error::InvalidElement(e.to_string()))?;
        return v
            .as_array()
            .unwrap()
            .iter()
            .map(|x| parse_elem(k, x))
            .collect();
    }
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in t.char_indices() {
        match c {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => {
                items.push(&t[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push(&t[start..]);
    items.into_iter().map(|s| parse_elem_str(k, s)).collect()
}

/// Canonical JSON for an element, accepted back by [`parse_elem`].
pub fn elem_to_json(k: &Carrier, a: &FieldElem) -> Value {
    match (k, a) {
        (Carrier::Quadratic(_), FieldElem::Alg(v)) => json!({"a": v[0].to_string(), "b": v[1].to_string()}),
        (_, FieldElem::Alg(v)) => json!({"coeffs": v.iter().map(ToString::to_string).collect::<Vec<_>>()}),
        (_, FieldElem::Func(f)) => json!({"num": f.num().display_with("t"), "den": f.den().display_with("t")}),
        (_, FieldElem::Rat(q)) => Value::String(q.to_string()),
    }
}
