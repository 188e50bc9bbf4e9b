//! Named checks with residuals, CSV tables and run reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Error;

/// `{:.16e}` with fixed spellings for non-finite values.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

/// One measured residual compared against its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub residual: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
    /// Error text when the computation itself failed.
    pub detail: Option<String>,
}

impl Check {
    pub fn at_most(suite: &str, name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self::new(suite, name.into(), residual, Relation::AtMost, threshold)
    }

    pub fn at_least(suite: &str, name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self::new(suite, name.into(), residual, Relation::AtLeast, threshold)
    }

    /// A yes/no property: residual 0 when it holds, 1 otherwise.
    pub fn holds(suite: &str, name: impl Into<String>, ok: bool) -> Self {
        Self::at_most(suite, name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn failed(suite: &str, name: impl Into<String>, err: &Error) -> Self {
        let mut c = Self::new(suite, name.into(), f64::NAN, Relation::AtMost, f64::NAN);
        c.detail = Some(err.to_string());
        c
    }

    fn new(suite: &str, name: String, residual: f64, relation: Relation, threshold: f64) -> Self {
        let pass = match relation {
            Relation::AtMost => residual <= threshold,
            Relation::AtLeast => residual >= threshold,
        };
        Self { suite: suite.into(), name, residual, relation, threshold, pass, detail: None }
    }
}

/// A CSV table; cells are stored already formatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&v| fmt_float(v)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub title: String,
    pub grid: (usize, f64, usize),
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    /// Shown in the summary only; never written to CSV.
    pub wall_clock: Option<std::time::Duration>,
}

impl RunReport {
    pub fn new(title: impl Into<String>, grid: (usize, f64, usize)) -> Self {
        Self { title: title.into(), grid, checks: Vec::new(), tables: Vec::new(), wall_clock: None }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn checks_table(&self) -> Table {
        let mut t = Table::new("checks", &["suite", "check", "residual", "relation", "threshold", "pass"]);
        for c in &self.checks {
            t.push(vec![
                c.suite.clone(),
                c.name.clone(),
                fmt_float(c.residual),
                c.relation.symbol().into(),
                fmt_float(c.threshold),
                if c.pass { "true" } else { "false" }.into(),
            ]);
        }
        t
    }

    pub fn summary(&self) -> String {
        let (n, l, m) = self.grid;
        let mut s = format!("{} (N = {n}, L = {l}, M = {m})\n", self.title);
        for c in &self.checks {
            let _ = write!(
                s,
                "  [{}] {}/{}: {:.3e} {} {:.3e}",
                if c.pass { "pass" } else { "FAIL" },
                c.suite,
                c.name,
                c.residual,
                c.relation.symbol(),
                c.threshold
            );
            if let Some(d) = &c.detail {
                let _ = write!(s, " ({d})");
            }
            s.push('\n');
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        let _ = write!(s, "{} checks, {} failed", self.checks.len(), failed);
        if let Some(d) = self.wall_clock {
            let _ = write!(s, " in {:.2} s", d.as_secs_f64());
        }
        s.push('\n');
        s
    }

    /// Writes `checks.csv` and one CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in std::iter::once(&self.checks_table()).chain(&self.tables) {
            let path = dir.join(format!("{}.csv", t.name));
            std::fs::write(&path, t.to_csv())?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
    }

    #[test]
    fn failed_checks_never_pass() {
        let c = Check::failed("s", "x", &Error::EmptyDomain);
        assert!(!c.pass && c.detail.is_some());
        assert!(Check::at_least("s", "y", 2.0, 1.5).pass);
    }
}
