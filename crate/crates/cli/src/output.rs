//! Table emission. Every number goes through [`sig12`] so CSV and JSON agree.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// JSON number at 12 significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(sig12(x)).map(Value::Number).unwrap_or(Value::Null)
}

/// Walks a JSON tree and rounds every float.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        v => v,
    }
}

/// A flat table with a fixed column order.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> =
                        self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for r in &self.rows {
            out.write_record(r.iter().map(cell))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{:?}", sig12(x)),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// Where a command's result goes.
#[derive(Debug, Clone)]
pub struct Sink {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    /// `--format` wins; otherwise the extension of `--out` decides, and JSON
    /// is the fallback.
    pub fn new(path: Option<PathBuf>, format: Option<Format>) -> Self {
        let format = format.unwrap_or_else(|| match path.as_deref().and_then(Path::extension) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        });
        Self { path, format }
    }

    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => Box::new(File::create(p).with_context(|| format!("cannot write {}", p.display()))?),
            None => Box::new(io::stdout().lock()),
        })
    }

    /// Emits `json` or `table` depending on the format.
    pub fn emit(&self, json: &Value, table: &Table) -> Result<()> {
        let mut w = self.writer()?;
        match self.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, &round_floats(json.clone()))?;
                writeln!(w)?;
            }
            Format::Csv => table.write_csv(&mut w)?,
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(0.1234567890123456), 0.123456789012);
        assert_eq!(sig12(6.324555320336759e-13), 6.32455532034e-13);
        assert_eq!(sig12(0.0), 0.0);
        assert!(sig12(f64::NAN).is_nan());
    }

    #[test]
    fn csv_cells() {
        let mut t = Table::new(vec!["a", "b", "c"]);
        t.push(vec![num(1.0 / 3.0), Value::Null, Value::from("x")]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b,c\n0.333333333333,,x\n");
        let mut t = Table::new(vec!["a"]);
        t.push(vec![num(7.386888445851e-10)]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a\n7.38688844585e-10\n");
    }
}
