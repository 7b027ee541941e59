//! Result tables.
//!
//! CSV output starts with a single `# relaylab <version>` line, followed by
//! a header whose numeric columns carry their unit as `name[unit]`. JSON
//! output holds the same column names, a `units` map and one object per row
//! with keys in column order. Reals are written in shortest round-trip form,
//! so identical results give identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::config::Format;

pub const BITS: &str = "bits/use";
pub const PROB: &str = "probability";
pub const COUNT: &str = "count";

pub fn version_line() -> String {
    format!("relaylab {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(u64),
    Real(f64),
    Bool(bool),
    Missing,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) if x.is_finite() => x.to_string(),
            Cell::Real(_) | Cell::Missing => String::new(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Text(t) => s.serialize_str(t),
            Cell::Int(i) => s.serialize_u64(*i),
            Cell::Real(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Real(_) | Cell::Missing => s.serialize_none(),
            Cell::Bool(b) => s.serialize_bool(*b),
        }
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

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column {
    pub name: &'static str,
    pub unit: Option<&'static str>,
}

pub const fn col(name: &'static str, unit: Option<&'static str>) -> Column {
    Column { name, unit }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

struct Row<'a>(&'a [Column], &'a [Cell]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (c, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(c.name, v)?;
        }
        m.end()
    }
}

#[derive(Serialize)]
struct Document<'a> {
    tool: String,
    columns: Vec<&'static str>,
    units: std::collections::BTreeMap<&'static str, &'static str>,
    rows: Vec<Row<'a>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match the columns"
        );
        self.rows.push(row);
    }

    pub fn header(&self) -> Vec<String> {
        self.columns
            .iter()
            .map(|c| match c.unit {
                Some(u) => format!("{}[{u}]", c.name),
                None => c.name.to_string(),
            })
            .collect()
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => {
                let mut out = format!("# {}\n", version_line()).into_bytes();
                {
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(self.header())?;
                    for row in &self.rows {
                        w.write_record(row.iter().map(Cell::render))?;
                    }
                    w.flush()?;
                }
                Ok(String::from_utf8(out)?)
            }
            Format::Json => {
                let doc = Document {
                    tool: version_line(),
                    columns: self.columns.iter().map(|c| c.name).collect(),
                    units: self
                        .columns
                        .iter()
                        .filter_map(|c| c.unit.map(|u| (c.name, u)))
                        .collect(),
                    rows: self.rows.iter().map(|r| Row(&self.columns, r)).collect(),
                };
                let mut text = serde_json::to_string_pretty(&doc)?;
                text.push('\n');
                Ok(text)
            }
        }
    }

    /// Writes to `path`, or standard output when `path` is `None`.
    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match path {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                Ok(out.flush()?)
            }
        }
    }
}
