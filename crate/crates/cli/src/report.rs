//! Command reports rendered as JSON or CSV.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
    pub inputs: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// `None` for commands that only compute.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    pub summary: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            timestamp_unix: None,
            inputs: BTreeMap::new(),
            tol: None,
            pass: None,
            summary: BTreeMap::new(),
            table: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.summary.insert(key.to_string(), value.into());
        self
    }

    /// Records a float, writing non-finite values as strings so the JSON
    /// stays valid.
    pub fn set_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.set(key, num(value))
    }

    pub fn write(&self, out: &mut impl Write, format: Format) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Csv => self.write_csv(out),
        }
    }

    /// A `key,value` block of metadata and summary values, then the table
    /// (if any) after a blank line.
    fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let mut rec = |k: &str, v: String| w.write_record([k, v.as_str()]);
        rec("schema_version", self.schema_version.to_string())?;
        rec("command", self.command.clone())?;
        if let Some(t) = self.timestamp_unix {
            rec("timestamp_unix", t.to_string())?;
        }
        for (k, v) in &self.inputs {
            rec(&format!("input.{k}"), cell(v))?;
        }
        if let Some(t) = self.tol {
            rec("tol", num_string(t))?;
        }
        if let Some(p) = self.pass {
            rec("pass", p.to_string())?;
        }
        for (k, v) in &self.summary {
            rec(k, cell(v))?;
        }
        out.write_all(&w.into_inner().map_err(|e| e.into_error())?)?;
        if let Some(t) = &self.table {
            writeln!(out)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.columns)?;
            for r in &t.rows {
                w.write_record(r.iter().map(cell))?;
            }
            out.write_all(&w.into_inner().map_err(|e| e.into_error())?)?;
        }
        Ok(())
    }
}

fn num_string(v: f64) -> String {
    format!("{v:e}")
}

/// Float as a JSON number when finite, else as a string.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(v.to_string()))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => num_string(f),
            _ => n.to_string(),
        },
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
