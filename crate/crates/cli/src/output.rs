//! Tables and their CSV / JSON rendering.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn field(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Self {
            name: name.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

/// Provenance written ahead of every table.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub rng: String,
}

impl Metadata {
    fn entries(&self, table: &str) -> Vec<(&'static str, String)> {
        vec![
            ("tool", format!("sqcomb {}", env!("CARGO_PKG_VERSION"))),
            ("command", self.command.clone()),
            ("table", table.to_string()),
            ("config_sha256", self.config_sha256.clone()),
            ("seed", self.seed.to_string()),
            ("rng", self.rng.clone()),
        ]
    }
}

pub fn render(table: &Table, meta: &Metadata, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            for (key, value) in meta.entries(&table.name) {
                let _ = writeln!(out, "# {key}: {value}");
            }
            let mut writer = csv::Writer::from_writer(Vec::new());
            let records = std::iter::once(table.columns.iter().map(|c| c.to_string()).collect())
                .chain(
                    table
                        .rows
                        .iter()
                        .map(|row| row.iter().map(Cell::field).collect::<Vec<_>>()),
                );
            for record in records {
                writer.write_record(&record).expect("writing to memory");
            }
            let bytes = writer.into_inner().expect("writing to memory");
            out.push_str(&String::from_utf8(bytes).expect("fields are UTF-8"));
            out
        }
        Format::Json => {
            let metadata: Map<String, Value> = meta
                .entries(&table.name)
                .into_iter()
                .map(|(k, v)| (k.to_string(), Value::String(v)))
                .collect();
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    Value::Object(
                        table
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, cell)| (c.to_string(), cell.json()))
                            .collect(),
                    )
                })
                .collect();
            let doc = serde_json::json!({ "metadata": metadata, "rows": rows });
            format!("{doc}\n")
        }
    }
}

/// Writes each table to `<dir>/<table>.<ext>`, or all of them to `out`.
pub fn emit(
    tables: &[Table],
    meta: &Metadata,
    format: Format,
    dir: Option<&Path>,
    out: &mut dyn std::io::Write,
) -> Result<(), CliError> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for table in tables {
                let path = dir.join(format!("{}.{}", table.name, format.extension()));
                std::fs::write(&path, render(table, meta, format))?;
            }
        }
        None => {
            for (i, table) in tables.iter().enumerate() {
                if i > 0 && format == Format::Csv {
                    writeln!(out)?;
                }
                out.write_all(render(table, meta, format).as_bytes())?;
            }
        }
    }
    Ok(())
}
