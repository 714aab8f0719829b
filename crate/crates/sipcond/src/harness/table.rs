//! CSV result tables with a `#` metadata header.
//!
//! The body is RFC-4180 CSV with `.` decimals and `inf`/`-inf`/`nan` literals.
//! Floats are written in shortest round-trip form, so a table re-parsed by
//! [`ResultTable::parse`] serializes to the same bytes.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Schema version written into every table.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn parse(s: &str) -> Cell {
        if let Ok(i) = s.parse::<i64>() {
            return Cell::Int(i);
        }
        match s {
            "inf" => return Cell::Num(f64::INFINITY),
            "-inf" => return Cell::Num(f64::NEG_INFINITY),
            "nan" => return Cell::Num(f64::NAN),
            _ => {}
        }
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Cell::Num(x),
            _ => Cell::Text(s.to_string()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(if b { "pass" } else { "fail" }.to_string())
    }
}

/// Shortest round-trip decimal with `inf`/`-inf`/`nan` for non-finite values;
/// finite values always carry a `.` or an exponent.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

/// A named table: column names, rows and ordered metadata.
#[derive(Debug, Clone)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        ResultTable {
            name: name.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the schema of `{}`", self.name);
        self.rows.push(row);
    }

    /// Adds or replaces a metadata entry.
    pub fn meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.metadata.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.metadata.push((key.to_string(), value)),
        }
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// The CSV body (header row and records) without metadata.
    pub fn body(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Metadata header followed by the body.
    pub fn render(&self) -> Result<String> {
        let mut s = format!("# schema: sipcond/{}/v{SCHEMA_VERSION}\n", self.name);
        for (k, v) in &self.metadata {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        s.push_str(&self.body()?);
        Ok(s)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.render()?.as_bytes())?;
        Ok(())
    }

    /// Writes the table to `path`, replacing any existing file.
    pub fn write_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }

    /// Parses text produced by [`ResultTable::render`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = String::new();
        let mut metadata = Vec::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let (k, v) = line[1..].split_once(':').unwrap_or((&line[1..], ""));
            let (k, v) = (k.trim(), v.trim());
            if k == "schema" {
                name = v
                    .strip_prefix("sipcond/")
                    .and_then(|r| r.rsplit_once('/'))
                    .map(|(n, _)| n.to_string())
                    .ok_or_else(|| Error::Config(format!("unrecognized schema `{v}`")))?;
            } else {
                metadata.push((k.to_string(), v.to_string()));
            }
        }
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let columns = r.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(Cell::parse).collect());
        }
        Ok(ResultTable { name, columns, rows, metadata })
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
