use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use super::{Cell, CellKind, ScenarioResult};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "scenario,cell,inputs,computed,expected,tolerance,pass";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Parse(format!("unknown report format '{other}' (json or csv)"))),
        }
    }
}

/// Decimal text with 15 significant digits and no trailing zeros.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn parse_number(s: &str) -> Result<f64> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| Error::Parse(format!("bad number '{s}'"))),
    }
}

fn cell_value(c: &Cell) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), json!(c.name));
    m.insert("inputs".into(), json!(c.inputs));
    m.insert("kind".into(), json!(c.kind.as_str()));
    m.insert("computed".into(), json!(format_number(c.computed)));
    m.insert("expected".into(), json!(format_number(c.expected)));
    m.insert("tolerance".into(), json!(format_number(c.tolerance)));
    m.insert("pass".into(), json!(c.pass));
    if let Some(d) = &c.diagnostic {
        m.insert("diagnostic".into(), json!(d));
    }
    Value::Object(m)
}

fn result_value(r: &ScenarioResult) -> Value {
    let mut m = Map::new();
    m.insert("scenario".into(), json!(r.name));
    m.insert("seed".into(), json!(r.seed));
    m.insert("pass".into(), json!(r.passed()));
    m.insert("cells".into(), Value::Array(r.cells.iter().map(cell_value).collect()));
    Value::Object(m)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// The JSON report of one scenario.
pub fn render_json(result: &ScenarioResult) -> String {
    pretty(&result_value(result))
}

/// The JSON report of a suite run.
pub fn render_suite_json(seed: u64, results: &[ScenarioResult]) -> String {
    let mut m = Map::new();
    m.insert("seed".into(), json!(seed));
    m.insert("pass".into(), json!(results.iter().all(ScenarioResult::passed)));
    m.insert("scenarios".into(), Value::Array(results.iter().map(result_value).collect()));
    pretty(&Value::Object(m))
}

/// One CSV row per cell across `results`, after the header.
pub fn render_csv(results: &[ScenarioResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record(CSV_HEADER.split(',')).map_err(io)?;
    for r in results {
        for c in &r.cells {
            w.write_record([
                r.name.as_str(),
                c.name.as_str(),
                c.inputs.as_str(),
                &format_number(c.computed),
                &format_number(c.expected),
                &format_number(c.tolerance),
                if c.pass { "true" } else { "false" },
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
}

/// Writes `result` to `path`.
pub fn export_report(result: &ScenarioResult, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Json => render_json(result),
        ReportFormat::Csv => render_csv(std::slice::from_ref(result))?,
    };
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field '{key}'")))
}

fn text<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?.as_str().ok_or_else(|| Error::Parse(format!("field '{key}' is not a string")))
}

fn flag(v: &Value, key: &str) -> Result<bool> {
    field(v, key)?.as_bool().ok_or_else(|| Error::Parse(format!("field '{key}' is not a boolean")))
}

/// Reads back a report produced by [`render_json`]. `runtime_ms` is zero.
pub fn parse_report(json_text: &str) -> Result<ScenarioResult> {
    let v: Value = serde_json::from_str(json_text).map_err(|e| Error::Parse(e.to_string()))?;
    let cells = field(&v, "cells")?
        .as_array()
        .ok_or_else(|| Error::Parse("field 'cells' is not an array".into()))?
        .iter()
        .map(|c| {
            Ok(Cell {
                name: text(c, "name")?.to_string(),
                inputs: text(c, "inputs")?.to_string(),
                computed: parse_number(text(c, "computed")?)?,
                expected: parse_number(text(c, "expected")?)?,
                kind: CellKind::parse(text(c, "kind")?)?,
                tolerance: parse_number(text(c, "tolerance")?)?,
                pass: flag(c, "pass")?,
                diagnostic: c.get("diagnostic").and_then(Value::as_str).map(str::to_string),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioResult {
        name: text(&v, "scenario")?.to_string(),
        seed: field(&v, "seed")?.as_u64().ok_or_else(|| Error::Parse("field 'seed' is not an integer".into()))?,
        cells,
        runtime_ms: 0,
    })
}
