//! Check rows and the report files written for each run.
//!
//! `checks.csv` depends only on the configuration and seed: rows are sorted
//! by check name and floats use 17 significant digits. Timestamps and
//! timings go to `summary.json` only.

use std::fs;
use std::path::Path;

use prodint_core::evolution::ConvergenceTable;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Direction of the comparison `residual ≤ tolerance` or `residual ≥ tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
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

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub group: String,
    pub residual: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
    /// The identity or estimate being verified.
    pub identity: String,
}

impl CheckRow {
    pub fn at_most(check: impl Into<String>, group: &str, residual: f64, tolerance: f64, identity: &str) -> Self {
        Self {
            check: check.into(),
            group: group.to_string(),
            residual,
            relation: Relation::AtMost,
            tolerance,
            pass: residual <= tolerance,
            identity: identity.to_string(),
        }
    }

    pub fn at_least(check: impl Into<String>, group: &str, residual: f64, tolerance: f64, identity: &str) -> Self {
        Self {
            check: check.into(),
            group: group.to_string(),
            residual,
            relation: Relation::AtLeast,
            tolerance,
            pass: residual >= tolerance,
            identity: identity.to_string(),
        }
    }
}

/// Sorts rows by check name, then group.
pub fn sort_rows(rows: &mut [CheckRow]) {
    rows.sort_by(|a, b| a.check.cmp(&b.check).then_with(|| a.group.cmp(&b.group)));
}

pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Writes the rows as CSV into any writer.
pub fn write_checks<W: std::io::Write>(rows: &[CheckRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check", "group", "residual", "relation", "tolerance", "pass", "identity"])?;
    for r in rows {
        w.write_record([
            r.check.as_str(),
            r.group.as_str(),
            &fmt_float(r.residual),
            r.relation.symbol(),
            &fmt_float(r.tolerance),
            if r.pass { "true" } else { "false" },
            r.identity.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_convergence<W: std::io::Write>(table: &ConvergenceTable, group: &str, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group", "scheme", "h", "error", "local_order", "oracle_h", "fitted_order"])?;
    for row in &table.rows {
        w.write_record([
            group,
            table.scheme.name(),
            &fmt_float(row.h),
            &fmt_float(row.error),
            &row.local_order.map(fmt_float).unwrap_or_default(),
            &fmt_float(table.oracle_h),
            &fmt_float(table.order),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub tool: &'static str,
    pub version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
    pub threads: usize,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub environment: Environment,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub elapsed_seconds: f64,
    pub config: ExperimentConfig,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<String>,
    pub files: Vec<String>,
}

/// Everything produced by one run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub rows: Vec<CheckRow>,
    pub convergence: Vec<(String, ConvergenceTable)>,
}

impl RunReport {
    pub fn failures(&self) -> Vec<&CheckRow> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }

    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Writes `checks.csv`, the convergence tables and `summary.json`
    /// into `dir`; returns the file names.
    pub fn write(&self, dir: &Path, config: &ExperimentConfig, elapsed: f64) -> Result<Vec<String>, CliError> {
        fs::create_dir_all(dir)?;
        let mut files = vec!["checks.csv".to_string()];
        write_checks(&self.rows, fs::File::create(dir.join("checks.csv"))?)?;
        for (group, table) in &self.convergence {
            let name = format!("convergence_{}.csv", table.scheme.name());
            write_convergence(table, group, fs::File::create(dir.join(&name))?)?;
            files.push(name);
        }
        files.push("summary.json".to_string());
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let failures: Vec<String> = self.failures().iter().map(|r| r.check.clone()).collect();
        let summary = Summary {
            environment: Environment::current(),
            timestamp,
            elapsed_seconds: elapsed,
            config: config.clone(),
            checks: self.rows.len(),
            passed: self.rows.len() - failures.len(),
            failed: failures.len(),
            failures,
            files: files.clone(),
        };
        fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
        Ok(files)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(f64::NAN), "NaN");
    }

    #[test]
    fn rows_sorted_and_serialized() {
        let mut rows = vec![
            CheckRow::at_most("b", "so3", 1e-9, 1e-8, "x"),
            CheckRow::at_least("a", "so3", 1.9, 1.8, "y, z"),
        ];
        sort_rows(&mut rows);
        let mut buf = Vec::new();
        write_checks(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "check,group,residual,relation,tolerance,pass,identity");
        assert!(lines[1].starts_with("a,so3,1.8999999999999999e0,>=,"));
        assert!(lines[1].ends_with(",true,\"y, z\""));
        assert!(lines[2].starts_with("b,"));
    }
}
