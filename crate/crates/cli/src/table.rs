//! Output tables: CSV with a `#` metadata line, or JSON `{"meta": ..., "rows": [...]}`.
//!
//! Complex cells become two CSV columns `<name>_re,<name>_im` and a `[re, im]` pair in JSON.

use std::io::Write;

use clap::ValueEnum;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Complex(Option<Complex64>),
    Real(Option<f64>),
    Int(usize),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn complex(z: Complex64) -> Cell {
        Cell::Complex(Some(z))
    }

    pub fn real(x: f64) -> Cell {
        Cell::Real(Some(x))
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }
}

/// Column name; complex columns expand to two CSV fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column {
    pub name: &'static str,
    pub complex: bool,
}

pub fn plain(name: &'static str) -> Column {
    Column { name, complex: false }
}

pub fn complex(name: &'static str) -> Column {
    Column { name, complex: true }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

// shortest round-trip form, in exponent notation away from moderate magnitudes
fn number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn meta_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Table { meta: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    fn csv_header(&self) -> Vec<String> {
        self.columns
            .iter()
            .flat_map(|c| {
                if c.complex {
                    vec![format!("{}_re", c.name), format!("{}_im", c.name)]
                } else {
                    vec![c.name.to_string()]
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = Vec::new();
        let meta: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={}", meta_text(v))).collect();
        writeln!(out, "# {}", meta.join("; ")).expect("write to memory");
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
            w.write_record(self.csv_header()).expect("write to memory");
            for row in &self.rows {
                let fields: Vec<String> = row
                    .iter()
                    .flat_map(|c| match c {
                        Cell::Complex(Some(z)) => vec![number(z.re), number(z.im)],
                        Cell::Complex(None) => vec![String::new(), String::new()],
                        Cell::Real(Some(x)) => vec![number(*x)],
                        Cell::Real(None) => vec![String::new()],
                        Cell::Int(n) => vec![n.to_string()],
                        Cell::Bool(b) => vec![b.to_string()],
                        Cell::Text(s) => vec![s.clone()],
                    })
                    .collect();
                w.write_record(fields).expect("write to memory");
            }
            w.flush().expect("write to memory");
        }
        String::from_utf8(out).expect("csv output is UTF-8")
    }

    pub fn to_json(&self) -> String {
        let meta: Map<String, Value> = self.meta.iter().cloned().collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(col, c)| {
                        let v = match c {
                            Cell::Complex(Some(z)) => json!([json_number(z.re), json_number(z.im)]),
                            Cell::Complex(None) | Cell::Real(None) => Value::Null,
                            Cell::Real(Some(x)) => json_number(*x),
                            Cell::Int(n) => json!(n),
                            Cell::Bool(b) => json!(b),
                            Cell::Text(s) => json!(s),
                        };
                        (col.name.to_string(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&json!({ "meta": meta, "rows": rows })).expect("serialisable");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}
