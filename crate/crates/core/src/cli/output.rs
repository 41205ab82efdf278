//! CSV tables and the `manifest.txt` written next to them.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::suites::SuiteReport;

/// 17 significant digits.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        // keeps -0.0 and 0.0 identical in the output
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

/// A table with a header row; values are already formatted.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One row per check.
pub fn suite_table(reports: &[SuiteReport]) -> Table {
    let mut t = Table::new(["suite", "check", "value [1]", "target [1]", "tolerance [1]", "passed"]);
    for rep in reports {
        for c in &rep.checks {
            t.push(vec![
                rep.suite.clone(),
                c.name.clone(),
                num(c.value),
                c.target.map(num).unwrap_or_default(),
                if c.tolerance.is_finite() { num(c.tolerance) } else { "report".into() },
                c.passed.to_string(),
            ]);
        }
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Complete,
    /// Artifacts are incomplete, e.g. a run stopped at a blow-up.
    Partial,
    /// Some check failed.
    Failed,
    /// The command stopped on an error.
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Complete => "complete",
            Status::Partial => "partial",
            Status::Failed => "failed",
            Status::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Complete => 0,
            Status::Partial | Status::Failed => 1,
            Status::Error => 2,
        }
    }

    pub fn worst(self, other: Status) -> Status {
        let rank = |s: Status| match s {
            Status::Complete => 0,
            Status::Failed => 1,
            Status::Partial => 2,
            Status::Error => 3,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

/// Ordered `key = value` lines.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn put(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let v = v.replace('\n', " ");
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.trim().to_string(), v.to_string()))
            .collect();
        Self { entries }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.txt");
        std::fs::write(&path, self.render())?;
        Ok(path)
    }
}
