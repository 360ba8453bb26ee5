use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{json, Map, Number, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Tsv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u128),
    Float(f64),
    Str(String),
    Empty,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => float_text(*v),
            Cell::Str(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match u64::try_from(*v) {
                Ok(v) => Value::Number(v.into()),
                Err(_) => Value::String(v.to_string()),
            },
            Cell::Float(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Str(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u128)
    }
}

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Rows sharing one header, plus trailing summary values (e.g. a fitted slope).
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub command: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(&'static str, Cell)>,
}

impl Table {
    pub fn new(command: &str, columns: &[&'static str]) -> Self {
        Table {
            command: command.to_string(),
            columns: columns.to_vec(),
            ..Table::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, wall_time: Option<f64>) -> String {
        match format {
            Format::Csv => self.delimited(','),
            Format::Tsv => self.delimited('\t'),
            Format::Json => self.json(wall_time),
        }
    }

    fn delimited(&self, sep: char) -> String {
        let sep_s = sep.to_string();
        let mut out = self.columns.join(&sep_s);
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| escape(&c.text(), sep)).collect();
            out.push_str(&cells.join(&sep_s));
            out.push('\n');
        }
        for (name, value) in &self.summary {
            out.push_str(name);
            out.push(sep);
            out.push_str(&escape(&value.text(), sep));
            out.push('\n');
        }
        out
    }

    fn json(&self, wall_time: Option<f64>) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut meta = json!({
            "build_version": env!("CARGO_PKG_VERSION"),
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
        });
        if let Some(t) = wall_time {
            meta["wall_time_seconds"] = json!(t);
        }
        let mut doc = json!({ "meta": meta, "records": records });
        if !self.summary.is_empty() {
            let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
            doc["summary"] = Value::Object(summary);
        }
        let mut s = serde_json::to_string_pretty(&doc).expect("json values always serialize");
        s.push('\n');
        s
    }
}

/// Shortest round-trip decimal; exponent form outside `[1e-4, 1e16)`.
fn float_text(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn escape(s: &str, sep: char) -> String {
    if s.contains(sep) || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_out(text: &str, path: Option<&std::path::Path>) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
