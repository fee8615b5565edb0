//! Tabular experiment output with provenance.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub scenario_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn new(scenario_hash: String, seed: u64) -> Self {
        Self { scenario_hash, seed, version: env!("CARGO_PKG_VERSION").to_string() }
    }
}

/// One curve or matrix, written as its own CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    pub tables: Vec<Table>,
    pub summary: BTreeMap<String, serde_json::Value>,
    pub provenance: Provenance,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl ExperimentResult {
    pub fn new(name: &str, provenance: Provenance) -> Self {
        Self { name: name.into(), tables: Vec::new(), summary: BTreeMap::new(), provenance }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("summary values serialise");
        self.summary.insert(key.into(), v);
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(|v| v.as_f64())
    }

    /// `<name>_<table>.csv` per table and `<name>.json` with summary and provenance.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for t in &self.tables {
            let p = dir.join(format!("{}_{}.csv", self.name, t.name));
            t.write_csv(&p)?;
            out.push(p);
        }
        #[derive(Serialize)]
        struct Summary<'a> {
            name: &'a str,
            summary: &'a BTreeMap<String, serde_json::Value>,
            provenance: &'a Provenance,
            tables: Vec<&'a str>,
        }
        let s = Summary {
            name: &self.name,
            summary: &self.summary,
            provenance: &self.provenance,
            tables: self.tables.iter().map(|t| t.name.as_str()).collect(),
        };
        let p = dir.join(format!("{}.json", self.name));
        std::fs::write(&p, serde_json::to_string_pretty(&s)?)?;
        out.push(p);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_csv_and_json() {
        let dir = std::env::temp_dir().join(format!("pap-report-{}", std::process::id()));
        let mut r = ExperimentResult::new("demo", Provenance::new("abc".into(), 3));
        let mut t = Table::new("curve", &["x", "y"]);
        t.push(vec![1.0, 2.5]);
        r.tables.push(t);
        r.set("peak", 2.5);
        let files = r.write(&dir).unwrap();
        assert_eq!(files.len(), 2);
        let csv = std::fs::read_to_string(dir.join("demo_curve.csv")).unwrap();
        assert_eq!(csv, "x,y\n1,2.5\n");
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("demo.json")).unwrap()).unwrap();
        assert_eq!(json["provenance"]["seed"], 3);
        assert_eq!(json["summary"]["peak"], 2.5);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
