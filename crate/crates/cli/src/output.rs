//! JSON and CSV rendering of serializable results.
//!
//! Both formats go through the same `serde_json::Value`, so numbers print
//! with the same shortest round-trip representation.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;

pub fn render<T: Serialize>(value: &T, format: Format) -> Result<String, String> {
    let value = serde_json::to_value(value).map_err(|e| e.to_string())?;
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).map_err(|e| e.to_string())?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => to_csv(&value),
    }
}

pub fn write(text: &str, path: Option<&Path>) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

/// An array becomes one row per element, anything else a single row. Nested
/// objects and arrays are flattened into dotted column names.
fn to_csv(value: &Value) -> Result<String, String> {
    let rows: Vec<Vec<(String, String)>> = match value {
        Value::Array(items) => items.iter().map(flatten_row).collect(),
        other => vec![flatten_row(other)],
    };
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(|e| e.to_string())?;
    for row in &rows {
        let record: Vec<&str> = header
            .iter()
            .map(|h| row.iter().find(|(k, _)| k == h).map(|(_, v)| v.as_str()).unwrap_or(""))
            .collect();
        w.write_record(&record).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

fn flatten_row(value: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    match value {
        Value::Object(map) => flatten_into("", map, &mut out),
        other => out.push(("value".to_string(), scalar(other))),
    }
    out
}

fn flatten_into(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        flatten_value(key, v, out);
    }
}

fn flatten_value(key: String, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => flatten_into(&key, m, out),
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten_value(format!("{key}.{i}"), item, out);
            }
        }
        other => out.push((key, scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
