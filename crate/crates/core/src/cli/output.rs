//! Tables and their CSV / JSON-lines serialization.
//!
//! Both formats end with a metadata record carrying the seed, crate version
//! and configuration hash. Floats use the shortest round-trip representation,
//! so output bytes depend only on the computed values.

use std::io::Write;

use serde_json::{Map, Value};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metadata {
    pub seed: u64,
    pub version: &'static str,
    pub config_hash: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub fn write_table(
    out: &mut dyn Write,
    table: &Table,
    meta: &Metadata,
    format: Format,
) -> Result<()> {
    match format {
        Format::Csv => write_csv(out, table, meta),
        Format::Json => write_json(out, table, meta),
    }
}

fn write_csv(out: &mut dyn Write, table: &Table, meta: &Metadata) -> Result<()> {
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut *out);
        let io = |e: csv::Error| crate::error::Error::Io(e.to_string());
        w.write_record(&table.columns).map_err(io)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::csv_field))
                .map_err(io)?;
        }
        w.flush()?;
    }
    writeln!(
        out,
        "# seed={}, version={}, config_hash={}",
        meta.seed, meta.version, meta.config_hash
    )?;
    Ok(())
}

fn write_json(out: &mut dyn Write, table: &Table, meta: &Metadata) -> Result<()> {
    for row in &table.rows {
        let obj: Map<String, Value> = table
            .columns
            .iter()
            .zip(row)
            .map(|(c, v)| (c.to_string(), v.json()))
            .collect();
        writeln!(out, "{}", Value::Object(obj))?;
    }
    let mut m = Map::new();
    m.insert("seed".into(), Value::from(meta.seed));
    m.insert("version".into(), Value::from(meta.version));
    m.insert("config_hash".into(), Value::from(meta.config_hash.as_str()));
    let mut wrapper = Map::new();
    wrapper.insert("_meta".into(), Value::Object(m));
    writeln!(out, "{}", Value::Object(wrapper))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Table, Metadata) {
        let mut t = Table::new(&["q", "value", "diagram"]);
        t.push(vec![4usize.into(), (-0.25).into(), "4; 0-2, 1-3".into()]);
        t.push(vec![8usize.into(), Cell::Empty, "x".into()]);
        let meta = Metadata {
            seed: 7,
            version: "0.1.0",
            config_hash: "ab".into(),
        };
        (t, meta)
    }

    #[test]
    fn csv_quotes_and_trails_metadata() {
        let (t, m) = sample();
        let mut buf = Vec::new();
        write_table(&mut buf, &t, &m, Format::Csv).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "q,value,diagram\n4,-0.25,\"4; 0-2, 1-3\"\n8,,x\n# seed=7, version=0.1.0, config_hash=ab\n"
        );
    }

    #[test]
    fn json_lines() {
        let (t, m) = sample();
        let mut buf = Vec::new();
        write_table(&mut buf, &t, &m, Format::Json).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], r#"{"diagram":"4; 0-2, 1-3","q":4,"value":-0.25}"#);
        assert_eq!(lines[1], r#"{"diagram":"x","q":8,"value":null}"#);
        assert_eq!(
            lines[2],
            r#"{"_meta":{"config_hash":"ab","seed":7,"version":"0.1.0"}}"#
        );
    }
}
