use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::spec::{ExperimentSpec, Format};
use crate::CliError;

/// Rows with a fixed column set, plus an optional free-form summary that
/// only the JSON form carries in full (CSV gets it as a comment line).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Value,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Value::Null,
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> impl Iterator<Item = &Value> {
        let j = self.columns.iter().position(|c| *c == name).expect("known column");
        self.rows.iter().map(move |r| &r[j])
    }

    fn records(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect();
                Value::Object(obj)
            })
            .collect()
    }
}

/// Self-describing block written at the top of every artifact.
pub fn meta(spec: &ExperimentSpec) -> Value {
    json!({
        "tool": "cops",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": spec.seed,
        "spec": spec,
    })
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn render(spec: &ExperimentSpec, table: &Table) -> Result<Vec<u8>, CliError> {
    match spec.format {
        Format::Json => {
            let doc = json!({ "meta": meta(spec), "results": table.records(), "summary": table.summary });
            let mut out = serde_json::to_vec_pretty(&doc)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut out = Vec::new();
            writeln!(out, "# meta {}", meta(spec))?;
            if !table.summary.is_null() {
                writeln!(out, "# summary {}", table.summary)?;
            }
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&table.columns)?;
            for r in &table.rows {
                w.write_record(r.iter().map(cell))?;
            }
            w.flush()?;
            drop(w);
            Ok(out)
        }
    }
}

/// Writes to `--out` if given, else to stdout.
pub fn emit(spec: &ExperimentSpec, bytes: &[u8]) -> Result<(), CliError> {
    match &spec.out {
        Some(path) => write_file(path, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, bytes)?;
    Ok(())
}
