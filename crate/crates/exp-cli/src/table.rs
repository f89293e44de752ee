//! Result tables and their CSV form.
//!
//! A file starts with `# key: value` metadata lines, including a `columns`
//! line that records each column's role and type, followed by an ordinary
//! CSV header and rows. Numbers are written with 17 significant digits so
//! that reading a file back reproduces every value bit for bit.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Sweep coordinate or other input.
    Param,
    Metric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Num,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub role: Role,
    pub ty: ColumnType,
}

impl Column {
    pub fn param(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            role: Role::Param,
            ty: ColumnType::Num,
        }
    }

    pub fn metric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            role: Role::Metric,
            ty: ColumnType::Num,
        }
    }

    pub fn text(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            role: Role::Metric,
            ty: ColumnType::Text,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Text(String),
}

impl Value {
    pub fn num(&self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(*x),
            Value::Text(_) => None,
        }
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            Value::Num(_) => None,
        }
    }

    /// Equality that treats two NaNs as equal and distinguishes `0.0` from `-0.0`.
    pub fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Num(a), Value::Num(b)) => {
                a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
            }
            (Value::Text(a), Value::Text(b)) => a == b,
            _ => false,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Num(if b { 1.0 } else { 0.0 })
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Num(n as f64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

/// 17 significant digits: enough to reproduce any `f64` exactly.
pub fn format_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_owned()
    } else if x > 0.0 {
        "inf".to_owned()
    } else {
        "-inf".to_owned()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
    /// Ordered `key: value` pairs written before the header.
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the schema"
        );
        for (v, c) in row.iter().zip(&self.columns) {
            let ok = matches!(
                (v, c.ty),
                (Value::Num(_), ColumnType::Num) | (Value::Text(_), ColumnType::Text)
            );
            assert!(ok, "column `{}` has the wrong value type", c.name);
        }
        self.rows.push(row);
    }

    /// Adds a metadata entry; line breaks are replaced by spaces.
    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let clean = |s: String| s.replace(['\n', '\r'], " ");
        self.metadata.push((clean(key.into()), clean(value.into())));
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric column by name.
    pub fn nums(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        self.rows.iter().map(|r| r[i].num()).collect()
    }

    /// Rows whose text column `name` equals `value`.
    pub fn filter(&self, name: &str, value: &str) -> Vec<&[Value]> {
        match self.column(name) {
            Some(i) => self
                .rows
                .iter()
                .filter(|r| r[i].text() == Some(value))
                .map(Vec::as_slice)
                .collect(),
            None => Vec::new(),
        }
    }

    /// Same schema, metadata and values, with NaNs compared equal.
    pub fn same(&self, other: &ResultTable) -> bool {
        self.columns == other.columns
            && self.metadata == other.metadata
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same(y)))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let schema: Vec<String> = self
            .columns
            .iter()
            .map(|c| {
                let role = match c.role {
                    Role::Param => "param",
                    Role::Metric => "metric",
                };
                let ty = match c.ty {
                    ColumnType::Num => "num",
                    ColumnType::Text => "text",
                };
                format!("{}={role}:{ty}", c.name)
            })
            .collect();
        let _ = writeln!(out, "# columns: {}", schema.join(" "));
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(|v| match v {
                Value::Num(x) => format_num(*x),
                Value::Text(s) => s.clone(),
            }))
            .expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory write");
        out.push_str(&String::from_utf8(body).expect("utf-8 input"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |m: String| CliError::Table(m);
        let mut metadata = Vec::new();
        let mut schema = None;
        let mut rest = text;
        while let Some(line) = rest.strip_prefix('#') {
            let (line, tail) = match line.find('\n') {
                Some(i) => (&line[..i], &line[i + 1..]),
                None => (line, ""),
            };
            rest = tail;
            let line = line.strip_suffix('\r').unwrap_or(line);
            let line = line.strip_prefix(' ').unwrap_or(line);
            let (k, v) = line
                .split_once(": ")
                .or_else(|| line.strip_suffix(':').map(|k| (k, "")))
                .ok_or_else(|| bad(format!("metadata line without `key: value`: {line:?}")))?;
            if k == "columns" {
                schema = Some(parse_schema(v)?);
            } else {
                metadata.push((k.to_owned(), v.to_owned()));
            }
        }
        let columns = schema.ok_or_else(|| bad("missing `# columns:` line".into()))?;
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(rest.as_bytes());
        let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.len() != columns.len() || header.iter().zip(&columns).any(|(h, c)| h != c.name) {
            return Err(bad("CSV header does not match the `columns` line".into()));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            if rec.len() != columns.len() {
                return Err(bad(format!(
                    "row {} has {} fields, expected {}",
                    rows.len() + 1,
                    rec.len(),
                    columns.len()
                )));
            }
            let row =
                rec.iter()
                    .zip(&columns)
                    .map(|(f, c)| match c.ty {
                        ColumnType::Text => Ok(Value::Text(f.to_owned())),
                        ColumnType::Num => f.parse::<f64>().map(Value::Num).map_err(|_| {
                            bad(format!("column `{}`: {f:?} is not a number", c.name))
                        }),
                    })
                    .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self {
            columns,
            rows,
            metadata,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

fn parse_schema(s: &str) -> Result<Vec<Column>> {
    let bad = |m: String| CliError::Table(m);
    let mut cols: Vec<Column> = Vec::new();
    for item in s.split_whitespace() {
        let (name, kind) = item
            .rsplit_once('=')
            .ok_or_else(|| bad(format!("bad column spec {item:?}")))?;
        let role = match kind.split_once(':').map(|p| p.0) {
            Some("param") => Role::Param,
            Some("metric") => Role::Metric,
            _ => return Err(bad(format!("bad column role in {item:?}"))),
        };
        let ty = match kind.split_once(':').map(|p| p.1) {
            Some("num") => ColumnType::Num,
            Some("text") => ColumnType::Text,
            _ => return Err(bad(format!("bad column type in {item:?}"))),
        };
        if name.is_empty() || cols.iter().any(|c| c.name == name) {
            return Err(bad(format!("empty or duplicate column name {name:?}")));
        }
        cols.push(Column {
            name: name.to_owned(),
            role,
            ty,
        });
    }
    if cols.is_empty() {
        return Err(bad("table has no columns".into()));
    }
    Ok(cols)
}
