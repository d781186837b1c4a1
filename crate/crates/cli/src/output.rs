//! CSV and validation-report writing. All numeric fields use fixed formats
//! so reruns with the same seed produce byte-identical files.

use anyhow::{Context, Result};
use std::path::{Path, PathBuf};

pub fn fmt_prob(v: f64) -> String {
    format!("{v:.6e}")
}

pub fn fmt_rate(v: f64) -> String {
    format!("{v:.6}")
}

pub fn fmt_power(v: f64) -> String {
    format!("{v:.1}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// One validation outcome going into the report.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Default)]
pub struct ExperimentReport {
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn write_report(path: &Path, experiment: &str, report: &ExperimentReport) -> Result<()> {
    use std::fmt::Write as _;
    let mut text = String::new();
    writeln!(text, "experiment: {experiment}")?;
    for file in &report.files {
        let name = file.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
        writeln!(text, "output: {name}")?;
    }
    if report.checks.is_empty() {
        writeln!(text, "no gated validations for this experiment")?;
    }
    for check in &report.checks {
        writeln!(
            text,
            "[{}] {} — {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        )?;
    }
    writeln!(
        text,
        "result: {}",
        if report.all_passed() { "PASS" } else { "FAIL" }
    )?;
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
