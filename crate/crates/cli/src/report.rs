//! JSON reports (schema 1) and CSV tables.
//!
//! A report is an object with the keys `schema`, `command`, `inputs`,
//! `results`, `tables`, `checks`, `verdict` and `wall_time_s`. Keys are
//! emitted in sorted order, so two runs on the same inputs differ only in
//! `wall_time_s`. Big counts are decimal strings; non-finite floats are the
//! strings `"inf"`, `"-inf"` and `"nan"`.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use shiftdim_core::dimension::DimensionEstimate;

pub const SCHEMA: u64 = 1;

/// A JSON number, or a string for values JSON cannot hold.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// A per-scale table: column names and rows of cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows })
    }
}

/// One comparison of a computed value against its target.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    /// `"pass"`, `"fail"` or `"inconclusive"`
    pub status: &'static str,
    pub note: Option<String>,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        let ok = (value - target).abs() <= tolerance;
        Check { name: name.into(), value, target, tolerance, status: if ok { "pass" } else { "fail" }, note: None }
    }

    pub fn inconclusive(mut self, note: impl Into<String>) -> Self {
        self.status = "inconclusive";
        self.note = Some(note.into());
        self
    }

    pub fn failed(&self) -> bool {
        self.status == "fail"
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    inputs: Map<String, Value>,
    results: Map<String, Value>,
    tables: Vec<(String, Table)>,
    checks: Vec<Check>,
    verdict: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: Map::new(),
            results: Map::new(),
            tables: Vec::new(),
            checks: Vec::new(),
            verdict: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.insert(key.to_string(), value.into());
        self
    }

    pub fn table(&mut self, name: &str, table: Table) -> &mut Self {
        self.tables.push((name.to_string(), table));
        self
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn set_verdict(&mut self, verdict: &str) -> &mut Self {
        self.verdict = Some(verdict.to_string());
        self
    }

    pub fn verdict(&self) -> Option<&str> {
        self.verdict.as_deref()
    }

    pub fn to_json(&self, wall_time_s: f64) -> Value {
        let tables: Map<String, Value> = self.tables.iter().map(|(k, t)| (k.clone(), t.to_json())).collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "value": num(c.value),
                    "target": num(c.target),
                    "tolerance": num(c.tolerance),
                    "status": c.status,
                    "note": c.note,
                })
            })
            .collect();
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "tables": tables,
            "checks": checks,
            "verdict": self.verdict,
            "wall_time_s": num(wall_time_s),
        })
    }

    /// All tables in one CSV: a leading `table` column names the source.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_path(path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        for (name, table) in &self.tables {
            let mut header = vec!["table"];
            header.extend(table.columns.iter().copied());
            w.write_record(&header)?;
            for row in &table.rows {
                let mut rec = vec![name.clone()];
                rec.extend(row.iter().map(cell_text));
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Extrapolated estimate with its per-scale sequence.
pub fn estimate_json(e: &DimensionEstimate) -> Value {
    json!({
        "value": num(e.value),
        "kind": e.kind.tag(),
        "fit_model": e.fit.model.tag(),
        "fit_coefficients": e.fit.coefficients.iter().map(|&c| num(c)).collect::<Vec<_>>(),
        "fit_rms_residual": num(e.fit.rms_residual),
    })
}

/// Per-scale rows `(M, N, value)` of an estimate.
pub fn estimate_table(e: &DimensionEstimate) -> Table {
    let mut t = Table::new(&["M", "N", "value"]);
    for (&(m, n), &v) in e.schedule.iter().zip(&e.sequence) {
        t.push(vec![json!(m), json!(n), num(v)]);
    }
    t
}

/// Pretty JSON with a trailing newline.
pub fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialise");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
