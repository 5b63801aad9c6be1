use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::asymptotics::ConvergenceTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

impl Comparison {
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Comparison::AtMost => value <= bound,
            Comparison::AtLeast => value >= bound,
            Comparison::Equal => value == bound,
        }
    }
}

/// One hard assertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

/// A named table written as `trace_<name>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TraceTable {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        TraceTable {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn from_convergence(name: impl Into<String>, trace: &ConvergenceTrace) -> Self {
        let mut t = TraceTable::new(name, &["T", "residual", "bound"]);
        for p in &trace.points {
            t.push(vec![p.t, p.residual, p.bound]);
        }
        t
    }

    pub fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:e}")))
                .map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("formatted floats are ASCII"))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub family: String,
    pub config_hash: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    /// Reported, never asserted.
    pub diagnostics: BTreeMap<String, serde_json::Value>,
    pub traces: Vec<TraceTable>,
    /// Wall-clock seconds per stage; the only nondeterministic field.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(family: impl Into<String>, config_hash: impl Into<String>, seed: u64) -> Self {
        RunReport {
            family: family.into(),
            config_hash: config_hash.into(),
            seed,
            checks: Vec::new(),
            diagnostics: BTreeMap::new(),
            traces: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    /// Records a check. Names must be unique within a report.
    pub fn check(
        &mut self,
        name: impl Into<String>,
        value: f64,
        comparison: Comparison,
        bound: f64,
    ) -> bool {
        let name = name.into();
        assert!(self.get(&name).is_none(), "check `{name}` recorded twice");
        let pass = comparison.holds(value, bound);
        self.checks.push(CheckRecord {
            name,
            value,
            bound,
            comparison,
            pass,
        });
        pass
    }

    pub fn at_most(&mut self, name: impl Into<String>, value: f64, bound: f64) -> bool {
        self.check(name, value, Comparison::AtMost, bound)
    }

    pub fn diagnostic(&mut self, name: impl Into<String>, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.diagnostics.insert(name.into(), v);
    }

    pub fn trace(&mut self, t: TraceTable) {
        self.traces.push(t);
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    /// Pretty JSON with the timings emptied.
    pub fn deterministic_json(&self) -> String {
        let mut r = self.clone();
        r.timings.clear();
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    /// Writes `report.json` and one `trace_<name>.csv` per table.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(1 + self.traces.len());
        let report = dir.join("report.json");
        std::fs::write(&report, serde_json::to_string_pretty(self)?)?;
        written.push(report);
        for t in &self.traces {
            if t.name.is_empty()
                || !t
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c))
            {
                return Err(Error::invalid(
                    "trace.name",
                    format!("`{}` is not a file-safe name", t.name),
                ));
            }
            let path = dir.join(format!("trace_{}.csv", t.name));
            std::fs::write(&path, t.csv()?)?;
            written.push(path);
        }
        Ok(written)
    }
}
