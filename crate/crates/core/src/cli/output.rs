//! Run artifacts: CSV tables, summary and manifest JSON, and their hashes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Command, ExperimentConfig};

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Formats a float for CSV output; the shortest form that round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<&'static str>) -> Self {
        Self {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// One acceptance statistic with its tolerance band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub passed: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lower,
            upper,
            passed: value >= lower && value <= upper,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, upper: f64) -> Self {
        Self::within(name, value, f64::NEG_INFINITY, upper)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub command: Command,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    /// Estimates and grid parameters beyond the checks.
    pub details: Value,
    /// `(file stem, svg text)`.
    pub plots: Vec<(String, String)>,
}

impl ExperimentOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub bytes: usize,
    pub fnv1a64: String,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub passed: bool,
    pub files: Vec<FileRecord>,
    pub summary: Value,
}

fn write_file(dir: &Path, name: &str, bytes: &[u8], records: &mut Vec<FileRecord>) -> std::io::Result<()> {
    fs::write(dir.join(name), bytes)?;
    records.push(FileRecord {
        name: name.to_string(),
        bytes: bytes.len(),
        fnv1a64: format!("{:016x}", fnv1a64(bytes)),
    });
    Ok(())
}

/// Writes tables, plots, `summary.json` and finally `manifest.json`, which
/// lists every other file with its hash.
pub fn write_artifacts(config: &ExperimentConfig, output: &ExperimentOutput) -> std::io::Result<RunReport> {
    let dir = config.out.clone();
    fs::create_dir_all(&dir)?;
    let fingerprint = format!("{:016x}", fnv1a64(config.fingerprint_text().as_bytes()));
    let mut files = Vec::new();
    for table in &output.tables {
        write_file(&dir, &format!("{}.csv", table.name), table.to_csv().as_bytes(), &mut files)?;
    }
    if config.plots {
        for (stem, svg) in &output.plots {
            write_file(&dir, &format!("{stem}.svg"), svg.as_bytes(), &mut files)?;
        }
    }
    let passed = output.passed();
    let summary = json!({
        "command": output.command.name(),
        "config_fingerprint": fingerprint,
        "seed": config.seed,
        "passed": passed,
        "checks": output.checks,
        "details": output.details,
    });
    let mut text = serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?;
    text.push('\n');
    write_file(&dir, "summary.json", text.as_bytes(), &mut files)?;

    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": output.command.name(),
        "seed": config.seed,
        "workers": config.workers,
        "config_fingerprint": fingerprint,
        "config": config.canonical(),
        "files": files,
    });
    let mut text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    Ok(RunReport {
        out_dir: dir,
        passed,
        files,
        summary,
    })
}
