//! Report serialization. Floats are always written with 17 significant
//! digits (`{:.16e}`) so identical runs give byte-identical files;
//! non-finite values become `null`.

use serde_json::Value;
use std::fmt::Write as _;

pub const SCHEMA_VERSION: u32 = 1;

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        // + 0.0 folds −0 into 0
        format!("{:.16e}", x + 0.0)
    } else {
        "null".to_string()
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_u64() || n.is_i64() {
                out.push_str(&n.to_string());
            } else {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            if a.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String(k.clone()));
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

pub fn to_json(v: &Value) -> String {
    let mut s = String::new();
    write_value(&mut s, v, 0);
    s.push('\n');
    s
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if !(n.is_u64() || n.is_i64()) => match n.as_f64() {
            Some(x) if x.is_finite() => fmt_f64(x),
            _ => String::new(),
        },
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One CSV row per record, columns from the scalar fields of the first
/// record (nested fields are skipped), with `schema_version` in front.
pub fn to_csv(records: &[Value]) -> String {
    let cols: Vec<String> = match records.first() {
        Some(Value::Object(m)) => m.iter().filter(|(_, v)| !v.is_array() && !v.is_object()).map(|(k, _)| k.clone()).collect(),
        _ => Vec::new(),
    };
    let mut out = String::from("schema_version");
    for c in &cols {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for r in records {
        out.push_str(&SCHEMA_VERSION.to_string());
        for c in &cols {
            out.push(',');
            out.push_str(&csv_cell(r.get(c).unwrap_or(&Value::Null)));
        }
        out.push('\n');
    }
    out
}

/// A header and float rows in the fixed numeric format.
pub fn numeric_csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = format!("schema_version,{header}\n");
    for row in rows {
        out.push_str(&SCHEMA_VERSION.to_string());
        for x in row {
            out.push(',');
            if x.is_finite() {
                out.push_str(&fmt_f64(x));
            }
        }
        out.push('\n');
    }
    out
}
