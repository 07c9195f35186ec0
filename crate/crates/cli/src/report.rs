use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance tag for values computed from a closed-form inequality.
pub const FORMULA: &str = "formula";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub config_echo: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Flat table shared by the JSON `rows` and the CSV output, so both carry the
/// same numbers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::solver(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(cell)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::solver(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// CSV text of a JSON scalar; numbers use the same shortest round-trip form.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Non-finite numbers become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn int(n: usize) -> Value {
    Value::from(n)
}

pub fn opt(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

pub fn text(s: impl Into<String>) -> Value {
    Value::String(s.into())
}

/// Wall-clock seconds per named stage.
#[derive(Debug)]
pub struct Timings {
    enabled: bool,
    stages: BTreeMap<String, f64>,
}

impl Timings {
    pub fn new(enabled: bool) -> Self {
        Timings {
            enabled,
            stages: BTreeMap::new(),
        }
    }

    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.stages.entry(stage.to_string()).or_insert(0.0) += start.elapsed().as_secs_f64();
        out
    }

    pub fn record(&mut self, stage: impl Into<String>, seconds: f64) {
        *self.stages.entry(stage.into()).or_insert(0.0) += seconds;
    }

    pub fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.enabled.then_some(self.stages)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(&["k", "mu", "source"]);
        t.push(vec![int(1), num(std::f64::consts::PI * 0.1), text("closed_form")]);
        t.push(vec![num(2.0), Value::Null, text("a,b")]);
        let csv = t.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,mu,source"));
        assert_eq!(lines.next(), Some("1,0.3141592653589793,closed_form"));
        assert_eq!(lines.next(), Some("2.0,,\"a,b\""));
        let json = t.to_json();
        assert_eq!(json[0]["mu"].as_f64(), Some(std::f64::consts::PI * 0.1));
        assert_eq!(num(f64::NAN), Value::Null);
    }
}
