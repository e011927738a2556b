//! Typed forms of every structured output document.
//!
//! [`validate`] parses a line into the type named by its `schema` tag with
//! unknown fields rejected, serializes it back and requires the same JSON.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct ValueDoc {
    pub decimal: String,
    pub radius: String,
    pub exact: bool,
    pub symbolic: Option<String>,
    pub finite_part: String,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct EvalDoc {
    pub schema: String,
    pub field: Value,
    pub expr: String,
    pub args: Vec<Value>,
    pub value: ValueDoc,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct HeightDoc {
    pub schema: String,
    pub field: Value,
    pub elem: Value,
    pub value: ValueDoc,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct PlaceRow {
    pub label: String,
    pub archimedean: bool,
    pub weight: String,
    pub values: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct PlacesDoc {
    pub schema: String,
    pub field: Value,
    pub elems: Vec<Value>,
    pub places: Vec<PlaceRow>,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct CheckDoc {
    pub schema: String,
    pub check: String,
    pub field: Value,
    pub elems: Vec<Value>,
    pub expr: Option<String>,
    pub residuals: Vec<ValueDoc>,
    pub holds: bool,
    pub detail: String,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct DivisorJson {
    pub generators: Vec<Value>,
    pub term: String,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct DivisorDoc {
    pub schema: String,
    pub op: String,
    pub field: Value,
    pub divisor: DivisorJson,
    pub value: Option<ValueDoc>,
    pub effective: Option<bool>,
    pub evidence: Option<String>,
    pub witness: Option<String>,
    pub beta: Option<String>,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct TemplateJson {
    pub functions: Vec<String>,
    pub term: String,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct PointHeightDoc {
    pub schema: String,
    pub field: Value,
    pub template: TemplateJson,
    pub point: serde_json::Map<String, Value>,
    pub value: ValueDoc,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub multipliers: Vec<String>,
    pub violation_bound: String,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct FeasibilityDoc {
    pub schema: String,
    pub task: String,
    pub verdict: String,
    pub weights: Option<Vec<String>>,
    pub certificate: Option<CertificateJson>,
    pub objective: Option<String>,
    pub objective_decimal: Option<String>,
    pub perturbation_bound: String,
    pub precision_bits: u32,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    pub field: Value,
    pub coords: serde_json::Map<String, Value>,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct HitJson {
    pub index: usize,
    pub point: PointJson,
    pub heights: Vec<String>,
    pub max_deviation: String,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct HitDoc {
    pub schema: String,
    pub index: usize,
    pub point: PointJson,
    pub heights: Vec<String>,
    pub max_deviation: String,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct SearchDoc {
    pub schema: String,
    pub best: HitJson,
    pub hits: Vec<HitJson>,
    pub examined: usize,
    pub filtered: usize,
    pub skipped: usize,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct TraceJson {
    pub index: usize,
    pub point: PointJson,
    pub height: String,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct TraceDoc {
    pub schema: String,
    pub index: usize,
    pub point: PointJson,
    pub height: String,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct ZetaDoc {
    pub schema: String,
    pub estimate: Option<String>,
    pub bound: String,
    pub witness: Option<TraceJson>,
    pub trace_length: usize,
    pub examined: usize,
    pub excluded: usize,
    pub skipped: usize,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct ErrorDoc {
    pub schema: String,
    pub error: ErrorBody,
}

fn round_trip<T: Serialize + for<'de> Deserialize<'de>>(v: &Value) -> Result<(), String> {
    let typed: T = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
    let back = serde_json::to_value(&typed).map_err(|e| e.to_string())?;
    if &back == v {
        Ok(())
    } else {
        Err(format!("document changed in the round trip: {back}"))
    }
}

/// Validate one output line. Returns the schema tag.
pub fn validate(line: &str) -> Result<String, String> {
    let v: Value = serde_json::from_str(line).map_err(|e| format!("not JSON: {e}"))?;
    let schema = v.get("schema").and_then(Value::as_str).ok_or("missing schema tag")?.to_string();
    match schema.as_str() {
        "gvf.eval/1" => round_trip::<EvalDoc>(&v),
        "gvf.height/1" => round_trip::<HeightDoc>(&v),
        "gvf.places/1" => round_trip::<PlacesDoc>(&v),
        "gvf.check/1" => round_trip::<CheckDoc>(&v),
        "gvf.divisor/1" => round_trip::<DivisorDoc>(&v),
        "gvf.point-height/1" => round_trip::<PointHeightDoc>(&v),
        "gvf.feasibility/1" => round_trip::<FeasibilityDoc>(&v),
        "gvf.search-hit/1" => round_trip::<HitDoc>(&v),
        "gvf.search-result/1" => round_trip::<SearchDoc>(&v),
        "gvf.zeta-trace/1" => round_trip::<TraceDoc>(&v),
        "gvf.zeta-result/1" => round_trip::<ZetaDoc>(&v),
        "gvf.error/1" => round_trip::<ErrorDoc>(&v),
        other => Err(format!("unknown schema {other:?}")),
    }?;
    Ok(schema)
}
