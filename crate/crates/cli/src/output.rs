use serde_json::{json, Map, Value};

use crate::args::Format;

/// A named table of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }
}

/// What a run echoes ahead of its results.
#[derive(Debug, Clone)]
pub struct Header {
    pub config: Map<String, Value>,
}

impl Header {
    pub fn new(config: Map<String, Value>) -> Self {
        Self { config }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.config.insert(key.to_string(), value);
        self
    }

    fn comment_lines(&self) -> String {
        let mut out = format!("# stable-rd {}\n", env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.config {
            out.push_str(&format!("# {k} = {}\n", plain(v)));
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(plain).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

/// Shortest representation that reads back to the same `f64`.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

pub fn render_table(header: &Header, table: &Table, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = header.comment_lines();
            out.push_str(&table.columns.join(","));
            out.push('\n');
            for row in &table.rows {
                out.push_str(&row.iter().map(|v| number(*v)).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let doc = json!({
                "version": env!("CARGO_PKG_VERSION"),
                "config": header.config,
                "name": table.name,
                "columns": table.columns,
                "rows": table.rows,
            });
            pretty(&doc)
        }
    }
}

/// JSON wrapper around a result document and a run report.
pub fn render_document(header: &Header, result: Value, report: Value) -> String {
    pretty(&json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": header.config,
        "result": result,
        "report": report,
    }))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
