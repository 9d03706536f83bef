use std::fmt;
use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Value};

use hgbs_core::keying::FORMAT_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Plain,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(i) => Value::from(i),
                Err(_) => Value::from(v.to_string()),
            },
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

impl fmt::Display for Cell {
    /// Floats use the shortest string that parses back to the same value,
    /// which never depends on locale.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v:?}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cell!(u32, u64, usize, i64);

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

/// Provenance of a report: tool version plus the exact arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Meta {
    pub args: Vec<String>,
}

impl Meta {
    fn line(&self) -> String {
        format!(
            "# {} {} format_version={FORMAT_VERSION} args={}",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION"),
            self.args.join(" ")
        )
    }

    fn json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tool".into(), env!("CARGO_PKG_NAME").into());
        m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        m.insert("format_version".into(), FORMAT_VERSION.into());
        m.insert("args".into(), self.args.clone().into());
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }
}

pub fn emit_report(report: &Report, format: Format, meta: Option<&Meta>, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => {
            if let Some(meta) = meta {
                writeln!(out, "{}", meta.line())?;
            }
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut *out);
            w.write_record(&report.columns)?;
            for row in &report.rows {
                w.write_record(row.iter().map(Cell::to_string))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = report
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let doc = match meta {
                Some(meta) => {
                    let mut obj = meta.json();
                    obj.insert("columns".into(), report.columns.clone().into());
                    obj.insert("rows".into(), rows.into());
                    Value::Object(obj)
                }
                None => Value::Array(rows),
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
        Format::Plain => {
            if let Some(meta) = meta {
                writeln!(out, "{}", meta.line())?;
            }
            let text: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::to_string).collect())
                .collect();
            let widths: Vec<usize> = report
                .columns
                .iter()
                .enumerate()
                .map(|(i, c)| text.iter().map(|r| r[i].len()).fold(c.len(), usize::max))
                .collect();
            let line = |cells: Vec<&str>| {
                let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                padded.join("  ").trim_end().to_string()
            };
            writeln!(out, "{}", line(report.columns.clone()))?;
            for row in &text {
                writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
            }
        }
    }
    Ok(())
}
