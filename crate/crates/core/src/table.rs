//! Flat tables and their byte-stable CSV / JSON emission.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(i64::try_from(v).expect("table integers fit in i64"))
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::from(v as u64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

/// Rounds to 6 significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.5e}").parse().expect("scientific output parses")
}

/// 6 significant digits, plain decimal notation, no trailing zeros.
pub fn format_sig6(x: f64) -> String {
    round_sig6(x).to_string()
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Null => f.write_str("null"),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Float(x) => f.write_str(&format_sig6(*x)),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown output format {other:?} (expected csv or json)"))),
        }
    }
}

impl Format {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<I, S>(columns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<impl Iterator<Item = &Cell> + '_> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(move |r| &r[i]))
    }

    /// The table as it reads back after emission: floats rounded to 6 significant digits.
    pub fn normalized(&self) -> Table {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match c {
                        Cell::Float(x) => Cell::Float(round_sig6(*x)),
                        other => other.clone(),
                    })
                    .collect()
            })
            .collect();
        Table { columns: self.columns.clone(), rows }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_string)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are UTF-8")
    }

    /// `{"columns": [...], "rows": [[...], ...]}` with floats at 6 significant digits.
    pub fn to_json(&self) -> String {
        let normalized = self.normalized();
        let mut s = serde_json::to_string(&json!({
            "columns": normalized.columns,
            "rows": normalized.rows,
        }))
        .expect("tables always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Table> {
        #[derive(Deserialize)]
        struct Raw {
            columns: Vec<String>,
            rows: Vec<Vec<Value>>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Validation(format!("invalid table JSON: {e}")))?;
        let mut t = Table::new(raw.columns);
        for row in raw.rows {
            if row.len() != t.columns.len() {
                return Err(Error::Validation("table row width does not match its header".into()));
            }
            let cells = row
                .into_iter()
                .map(|v| match v {
                    Value::Null => Ok(Cell::Null),
                    Value::Bool(b) => Ok(Cell::Bool(b)),
                    Value::Number(n) => {
                        Ok(n.as_i64().map_or_else(|| Cell::Float(n.as_f64().unwrap_or(f64::NAN)), Cell::Int))
                    }
                    Value::String(s) => Ok(Cell::Text(s)),
                    other => Err(Error::Validation(format!("unsupported table cell {other}"))),
                })
                .collect::<Result<_>>()?;
            t.rows.push(cells);
        }
        Ok(t)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes `table` to `path`. The file appears only once fully written.
pub fn emit(table: &Table, format: Format, path: &Path) -> Result<()> {
    write_atomic(path, table.render(format).as_bytes())
}

/// Writes `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).and_then(|_| tmp.flush()).map_err(|e| Error::io(path, e))?;
    // dropping `tmp` on an early return removes the partial file
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
