use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::diagram::BinnedMeasure;
use crate::error::Result;
use crate::homology::VerboseDiagram;
use crate::io::{self, format_float};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check could not be decided from the data (e.g. zero variance).
    Inconclusive,
}

/// One check against a declared tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub observed: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, status: Status, observed: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            status,
            observed,
            threshold,
            detail: detail.into(),
        }
    }

    pub fn check(name: &str, ok: bool, observed: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self::new(
            name,
            if ok { Status::Pass } else { Status::Fail },
            observed,
            threshold,
            detail,
        )
    }
}

/// Named scalar, optionally tied to a window side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    pub status: Status,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
    /// What each verdict can and cannot establish.
    pub notes: Vec<String>,
    pub statistics: Vec<Statistic>,
    pub config: ExperimentConfig,
}

impl ExperimentReport {
    /// Fails if any verdict fails; inconclusive verdicts do not fail the run.
    pub fn overall(verdicts: &[Verdict]) -> Status {
        if verdicts.iter().any(|v| v.status == Status::Fail) {
            Status::Fail
        } else {
            Status::Pass
        }
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn statistic(&self, name: &str, window: Option<f64>) -> Option<f64> {
        self.statistics
            .iter()
            .find(|s| s.name == name && s.window == window)
            .map(|s| s.value)
    }
}

/// CSV table written as `<name>.csv` next to the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Formats a number for a table cell.
pub fn cell(x: impl Into<f64>) -> String {
    format_float(x.into())
}

/// Everything an experiment produces.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub tables: Vec<Table>,
    pub measures: Vec<(String, BinnedMeasure)>,
    pub diagrams: Vec<(String, Vec<VerboseDiagram>)>,
}

impl ExperimentOutput {
    /// Writes `report.json`, `<table>.csv`, `measures/<name>.{csv,json}` and
    /// `diagrams/<name>.csv` under `dir`, creating it if needed.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("measures"))?;
        fs::create_dir_all(dir.join("diagrams"))?;
        write_file(&dir.join("report.json"), |w| write_json(w, &self.report))?;
        for t in &self.tables {
            write_file(&dir.join(format!("{}.csv", t.name)), |w| t.write(w))?;
        }
        for (name, m) in &self.measures {
            write_file(&dir.join("measures").join(format!("{name}.csv")), |w| {
                io::write_measure(w, m)
            })?;
            write_file(&dir.join("measures").join(format!("{name}.json")), |w| {
                write_json(w, &io::measure_meta(m))
            })?;
        }
        for (name, d) in &self.diagrams {
            write_file(&dir.join("diagrams").join(format!("{name}.csv")), |w| {
                io::write_diagrams(w, d)
            })?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(w: &mut impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}
