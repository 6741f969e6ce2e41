//! Output files: CSV and JSON per data set, plus the report.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use graded_riccati::algebra::CMatrix;
use serde::Serialize;

use crate::run::Dataset;

/// Exit status of a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    GateFailure,
    ConfigError,
    NumericFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::GateFailure => 1,
            Status::ConfigError => 2,
            Status::NumericFailure => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub error: String,
    /// Where the computation broke down, when known.
    pub coordinates: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GateResult {
    pub value: f64,
    pub gate: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub name: String,
    pub kind: String,
    pub status: Status,
    pub exit_code: i32,
    pub residuals: BTreeMap<String, GateResult>,
    pub failing: Vec<String>,
    pub metadata: BTreeMap<String, String>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    pub outputs: Vec<String>,
}

/// `{:.16e}` keeps 17 significant digits, enough to round-trip an `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(d: &Dataset) -> Vec<String> {
    let mut h = d.coordinates.clone();
    if let Some(v) = d.values.first() {
        for i in 1..=v.rows() {
            for j in 1..=v.cols() {
                h.push(format!("re_{i}_{j}"));
                h.push(format!("im_{i}_{j}"));
            }
        }
    }
    h
}

pub fn write_csv(path: &Path, d: &Dataset) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header(d))?;
    for (x, v) in d.points.iter().zip(&d.values) {
        let mut row: Vec<String> = x.iter().map(|&c| num(c)).collect();
        for z in v.as_slice() {
            row.push(num(z.re));
            row.push(num(z.im));
        }
        w.write_record(row)?;
    }
    w.flush()
}

#[derive(Serialize)]
struct DataJson<'a> {
    coordinates: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    axes: Option<&'a Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<&'a Vec<Vec<f64>>>,
    values: &'a [CMatrix],
}

pub fn write_json(path: &Path, d: &Dataset) -> io::Result<()> {
    let doc = DataJson {
        coordinates: &d.coordinates,
        axes: d.axes.as_ref(),
        points: d.axes.is_none().then_some(&d.points),
        values: &d.values,
    };
    fs::write(path, serde_json::to_string(&doc)? + "\n")
}

pub fn stem(name: &str, label: &str) -> String {
    if label.is_empty() {
        name.to_string()
    } else {
        format!("{name}-{label}")
    }
}

/// Writes every data set; returns the file names.
pub fn write_datasets(dir: &Path, name: &str, sets: &[Dataset]) -> io::Result<Vec<String>> {
    let mut files = vec![];
    for d in sets {
        let s = stem(name, &d.label);
        for (ext, write) in [("csv", write_csv as fn(&Path, &Dataset) -> io::Result<()>), ("json", write_json)] {
            let file = format!("{s}.{ext}");
            write(&dir.join(&file), d)?;
            files.push(file);
        }
    }
    Ok(files)
}

pub fn report_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}-report.json"))
}

pub fn write_report(dir: &Path, report: &Report) -> io::Result<PathBuf> {
    let path = report_path(dir, &report.name);
    fs::write(&path, serde_json::to_string_pretty(report)? + "\n")?;
    Ok(path)
}
