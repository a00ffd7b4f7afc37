//! Byte-stable JSON and CSV renderings of scan reports.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::scan::ScanReport;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::InvalidArgument(format!("unknown report format {s:?}"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

pub const CSV_COLUMNS: [&str; 7] = [
    "digest",
    "n-vertices",
    "mld-exact",
    "mld-decimal",
    "classification",
    "realizing-locus",
    "violations",
];

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// One row per instance, in report order.
pub fn scan_csv(report: &ScanReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for r in &report.instances {
        w.write_record([
            r.digest.clone(),
            r.n_vertices.to_string(),
            r.profile.mld.to_string(),
            r.mld_decimal.clone(),
            r.profile.classification.label(),
            r.profile.locus.as_ref().map(|l| l.to_string()).unwrap_or_default(),
            r.violations.len().to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn emit_scan(report: &ScanReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => to_json(report),
        ReportFormat::Csv => scan_csv(report),
    }
}

/// Writes `report` to `path` in `format`.
pub fn emit_report(report: &ScanReport, format: ReportFormat, path: &Path) -> Result<()> {
    std::fs::write(path, emit_scan(report, format)?)?;
    Ok(())
}
