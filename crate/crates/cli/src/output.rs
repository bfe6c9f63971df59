use std::io::{self, Write};

use serde_json::{Map, Value};

use crate::{Failure, Format, SCHEMA_VERSION};

/// Wraps `body` in the versioned envelope and prints it as one document.
pub fn print_json(command: &str, body: Value) -> Result<(), Failure> {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    doc.insert("command".into(), Value::from(command));
    if let Value::Object(fields) = body {
        for (k, v) in fields {
            doc.insert(k, v);
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(doc))
        .map_err(|e| Failure::new(5, e.to_string()))?;
    emit(&text)
}

pub fn emit(text: &str) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Failure::new(2, format!("cannot write output: {e}"))),
    }
}

/// Scalar JSON value as plain text (strings unquoted, null as `NA`).
pub fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "NA".into(),
        other => other.to_string(),
    }
}

/// Key/value listing in text (`key: value`) or TSV (`key<TAB>value`).
pub fn key_values(format: Format, rows: &[(String, String)]) -> String {
    let mut s = String::new();
    if format == Format::Tsv {
        s.push_str("key\tvalue\n");
    }
    for (k, v) in rows {
        match format {
            Format::Tsv => s.push_str(&format!("{k}\t{v}\n")),
            _ => s.push_str(&format!("{k}: {v}\n")),
        }
    }
    s.pop();
    s
}

/// Rows under a header, tab separated in both text and TSV modes.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join("\t");
    for r in rows {
        s.push('\n');
        s.push_str(&r.join("\t"));
    }
    s
}

/// Flattens an object's scalar fields in order.
pub fn object_rows(v: &Value) -> Vec<(String, String)> {
    match v {
        Value::Object(m) => m.iter().map(|(k, v)| (k.clone(), plain(v))).collect(),
        _ => Vec::new(),
    }
}
