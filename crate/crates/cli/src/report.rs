use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::config::{Command, Format};
use crate::error::{CliError, CliResult};

/// One cell of a summary or table.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Complex(Complex64),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_owned())
    }
}

impl From<Complex64> for Value {
    fn from(x: Complex64) -> Self {
        Value::Complex(x)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Real(x) => s.serialize_f64(*x),
            Value::Int(x) => s.serialize_i64(*x),
            Value::Bool(x) => s.serialize_bool(*x),
            Value::Text(x) => s.serialize_str(x),
            Value::Complex(z) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("re", &z.re)?;
                m.serialize_entry("im", &z.im)?;
                m.end()
            }
        }
    }
}

fn real_field(x: f64) -> String {
    format!("{x:.16e}")
}

impl Value {
    fn csv_fields(&self) -> Vec<String> {
        match self {
            Value::Real(x) => vec![real_field(*x)],
            Value::Int(x) => vec![x.to_string()],
            Value::Bool(x) => vec![x.to_string()],
            Value::Text(x) => vec![x.clone()],
            Value::Complex(z) => vec![real_field(z.re), real_field(z.im)],
        }
    }
}

/// Column-labelled rows. Complex cells occupy `<name>.re` and `<name>.im`
/// columns in CSV output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| (*c).to_owned()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    fn csv_header(&self) -> Vec<String> {
        let first = self.rows.first();
        let mut out = Vec::new();
        for (i, name) in self.columns.iter().enumerate() {
            if matches!(first.map(|r| &r[i]), Some(Value::Complex(_))) {
                out.push(format!("{name}.re"));
                out.push(format!("{name}.im"));
            } else {
                out.push(name.clone());
            }
        }
        out
    }
}

/// Result of one scenario run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: Command,
    pub seed: u64,
    pub summary: BTreeMap<String, Value>,
    pub tables: BTreeMap<String, Table>,
}

impl Report {
    pub fn new(command: Command, seed: u64) -> Self {
        Self { command, seed, summary: BTreeMap::new(), tables: BTreeMap::new() }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_owned(), value.into());
    }

    pub fn table(&mut self, name: &str, table: Table) {
        self.tables.insert(name.to_owned(), table);
    }

    pub fn is_empty(&self) -> bool {
        self.summary.is_empty() && self.tables.values().all(|t| t.rows.is_empty())
    }
}

/// Writes `report` next to `out`. JSON goes to `out` with a `.json`
/// extension; CSV writes `<stem>.summary.csv` and one `<stem>.<table>.csv`
/// per table. Returns the written paths in order.
pub fn emit_report(report: &Report, format: Format, out: &Path) -> CliResult<Vec<PathBuf>> {
    if report.is_empty() {
        return Err(CliError::EmptyReport);
    }
    match format {
        Format::Json => {
            let path = out.with_extension("json");
            let mut text = serde_json::to_string_pretty(report)
                .map_err(|e| CliError::Write { path: path.clone(), message: e.to_string() })?;
            text.push('\n');
            write_bytes(&path, text.as_bytes())?;
            Ok(vec![path])
        }
        Format::Csv => {
            let stem = out.with_extension("");
            let sibling = |suffix: &str| {
                let mut name = stem.file_name().unwrap_or_default().to_os_string();
                name.push(format!(".{suffix}.csv"));
                stem.with_file_name(name)
            };
            let mut written = Vec::new();
            let summary_path = sibling("summary");
            let mut rows = vec![vec!["key".to_owned(), "value".to_owned()]];
            rows.push(vec!["command".to_owned(), report.command.name().to_owned()]);
            rows.push(vec!["seed".to_owned(), report.seed.to_string()]);
            for (key, value) in &report.summary {
                match value {
                    Value::Complex(z) => {
                        rows.push(vec![format!("{key}.re"), real_field(z.re)]);
                        rows.push(vec![format!("{key}.im"), real_field(z.im)]);
                    }
                    other => rows.push(vec![key.clone(), other.csv_fields().remove(0)]),
                }
            }
            write_csv(&summary_path, &rows)?;
            written.push(summary_path);
            for (name, table) in &report.tables {
                let path = sibling(name);
                let mut rows = vec![table.csv_header()];
                rows.extend(table.rows.iter().map(|r| r.iter().flat_map(Value::csv_fields).collect()));
                write_csv(&path, &rows)?;
                written.push(path);
            }
            Ok(written)
        }
    }
}

fn write_csv(path: &Path, rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(row).map_err(|e| CliError::Write { path: path.to_owned(), message: e.to_string() })?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Write { path: path.to_owned(), message: e.to_string() })?;
    write_bytes(path, &bytes)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let err = |e: std::io::Error| CliError::Write { path: path.to_owned(), message: e.to_string() };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(err)?;
    }
    let mut f = BufWriter::new(File::create(path).map_err(err)?);
    f.write_all(bytes).map_err(err)?;
    f.flush().map_err(err)
}
