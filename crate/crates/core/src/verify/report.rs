//! Report rows and their CSV/JSON serialization.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

use crate::export::fmt_f64;
use crate::gbspline::SectionSpace;
use crate::spectral::BoundCheck;

pub const REPORT_HEADER: &str = "check,p,space,alpha,mode,n,beta,gamma,measured,bound,pass,ms";

/// One line of `report.csv`. Case fields are kept as text so that sweeps and
/// 2D cases can show `16|32|64` or `2x2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub check: String,
    pub p: String,
    pub space: String,
    pub alpha: String,
    pub mode: String,
    pub n: String,
    pub beta: String,
    pub gamma: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    pub ms: u64,
}

/// Case columns shared by the rows of one task.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CaseFields {
    pub p: String,
    pub space: String,
    pub alpha: String,
    pub mode: String,
    pub n: String,
    pub beta: String,
    pub gamma: String,
}

pub fn join<T: ToString>(values: &[T], sep: &str) -> String {
    values
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

impl CaseFields {
    pub fn new(p: impl ToString, space: &SectionSpace, n: impl ToString) -> Self {
        Self {
            p: p.to_string(),
            space: space.kind_label().to_string(),
            alpha: if space.is_polynomial() {
                "-".to_string()
            } else {
                space.alpha.to_string()
            },
            mode: space.mode_label().to_string(),
            n: n.to_string(),
            beta: "-".to_string(),
            gamma: "-".to_string(),
        }
    }

    /// Fields for checks that do not belong to a discretization case.
    pub fn global() -> Self {
        let dash = || "-".to_string();
        Self {
            p: dash(),
            space: dash(),
            alpha: dash(),
            mode: dash(),
            n: dash(),
            beta: dash(),
            gamma: dash(),
        }
    }

    pub fn with_coefficients(mut self, beta: impl ToString, gamma: impl ToString) -> Self {
        self.beta = beta.to_string();
        self.gamma = gamma.to_string();
        self
    }

    pub fn row(
        &self,
        check: impl Into<String>,
        measured: f64,
        bound: f64,
        pass: bool,
    ) -> ReportRow {
        ReportRow {
            check: check.into(),
            p: self.p.clone(),
            space: self.space.clone(),
            alpha: self.alpha.clone(),
            mode: self.mode.clone(),
            n: self.n.clone(),
            beta: self.beta.clone(),
            gamma: self.gamma.clone(),
            measured,
            bound,
            pass,
            ms: 0,
        }
    }

    pub fn from_check(&self, c: &BoundCheck) -> ReportRow {
        self.row(c.name.clone(), c.measured, c.bound, c.pass)
    }
}

impl ReportRow {
    /// Check family, i.e. the name up to the first `:`.
    pub fn family(&self) -> &str {
        self.check.split(':').next().unwrap_or(&self.check)
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.check,
            self.p,
            self.space,
            self.alpha,
            self.mode,
            self.n,
            self.beta,
            self.gamma,
            fmt_f64(self.measured),
            fmt_f64(self.bound),
            self.pass,
            self.ms
        )
    }
}

pub fn write_report_csv<W: Write>(mut w: W, rows: &[ReportRow]) -> io::Result<()> {
    writeln!(w, "{REPORT_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.csv_line())?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Counts {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

impl Counts {
    fn add(&mut self, pass: bool) {
        self.total += 1;
        if pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub checks: BTreeMap<String, Counts>,
    pub errors: Vec<String>,
}

impl Summary {
    pub fn from_rows(rows: &[ReportRow], seed: u64, errors: Vec<String>) -> Self {
        let mut all = Counts::default();
        let mut checks: BTreeMap<String, Counts> = BTreeMap::new();
        for r in rows {
            all.add(r.pass);
            checks
                .entry(r.family().to_string())
                .or_default()
                .add(r.pass);
        }
        Self {
            seed,
            total: all.total,
            passed: all.passed,
            failed: all.failed,
            checks,
            errors,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.errors.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let case = CaseFields::new(2, &SectionSpace::polynomial(), 16).with_coefficients(1, 0);
        let mut buf = Vec::new();
        write_report_csv(&mut buf, &[case.row("mineig:mass", 0.5, 0.25, true)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            format!("{REPORT_HEADER}\nmineig:mass,2,poly,-,-,16,1,0,0.5,0.25,true,0\n")
        );
    }

    #[test]
    fn summary_counts_by_family() {
        let case = CaseFields::global();
        let rows = vec![
            case.row("a:x", 1.0, 1.0, true),
            case.row("a:y", 1.0, 1.0, false),
            case.row("b", 1.0, 1.0, true),
        ];
        let s = Summary::from_rows(&rows, 1, vec![]);
        assert_eq!((s.total, s.passed, s.failed), (3, 2, 1));
        assert_eq!(s.checks["a"].failed, 1);
        assert_eq!(s.checks["b"].passed, 1);
        assert!(!s.all_passed());
    }
}
