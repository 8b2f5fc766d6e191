use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

use super::fit::{BoundCheck, ExpFit, FitResult};

/// One CSV line. `bound` and `ratio` are empty when no bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Row {
    pub t: f64,
    pub value: f64,
    pub bound: Option<f64>,
}

impl Row {
    pub fn ratio(&self) -> Option<f64> {
        self.bound.map(|b| self.value / b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
    /// |value| ≤ threshold.
    AbsAtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub pass: bool,
    /// Reported but not counted towards the overall verdict.
    pub informational: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        value: f64,
        comparison: Comparison,
        threshold: f64,
    ) -> Self {
        let pass = match comparison {
            Comparison::AtMost => value <= threshold,
            Comparison::AtLeast => value >= threshold,
            Comparison::AbsAtMost => value.abs() <= threshold,
        };
        Check {
            name: name.into(),
            value,
            comparison,
            threshold,
            pass,
            informational: false,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Comparison::AtMost, threshold)
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Comparison::AtLeast, threshold)
    }

    /// |value − target| ≤ tol.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        let mut c = Self::new(name, value - target, Comparison::AbsAtMost, tol);
        c.value = value;
        c.threshold = tol;
        c
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedFit {
    pub label: String,
    pub fit: FitResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedRate {
    pub label: String,
    pub fit: ExpFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedBound {
    pub label: String,
    pub check: BoundCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

/// Outcome of one experiment: the tabulated series plus its summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    #[serde(skip)]
    pub rows: Vec<Row>,
    pub fits: Vec<NamedFit>,
    pub rates: Vec<NamedRate>,
    pub bounds: Vec<NamedBound>,
    pub values: Vec<NamedValue>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(experiment: impl Into<String>) -> Self {
        Report {
            experiment: experiment.into(),
            rows: Vec::new(),
            fits: Vec::new(),
            rates: Vec::new(),
            bounds: Vec::new(),
            values: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn fit(&mut self, label: impl Into<String>, fit: FitResult) {
        self.fits.push(NamedFit {
            label: label.into(),
            fit,
        });
    }

    pub fn rate(&mut self, label: impl Into<String>, fit: ExpFit) {
        self.rates.push(NamedRate {
            label: label.into(),
            fit,
        });
    }

    pub fn bound(&mut self, label: impl Into<String>, check: BoundCheck) {
        self.bounds.push(NamedBound {
            label: label.into(),
            check,
        });
    }

    pub fn value(&mut self, name: impl Into<String>, value: f64) {
        self.values.push(NamedValue {
            name: name.into(),
            value,
        });
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn get_value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|v| v.name == name).map(|v| v.value)
    }

    pub fn get_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn get_fit(&self, label: &str) -> Option<&FitResult> {
        self.fits.iter().find(|f| f.label == label).map(|f| &f.fit)
    }

    /// True iff every non-informational check passes.
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass || c.informational)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks
            .iter()
            .filter(|c| !c.pass && !c.informational)
            .collect()
    }

    /// Merges the summary of another report, prefixing its labels.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        let p = |s: String| format!("{prefix}{s}");
        self.fits.extend(other.fits.into_iter().map(|mut f| {
            f.label = p(f.label);
            f
        }));
        self.rates.extend(other.rates.into_iter().map(|mut f| {
            f.label = p(f.label);
            f
        }));
        self.bounds.extend(other.bounds.into_iter().map(|mut f| {
            f.label = p(f.label);
            f
        }));
        self.values.extend(other.values.into_iter().map(|mut v| {
            v.name = p(v.name);
            v
        }));
        self.checks.extend(other.checks.into_iter().map(|mut c| {
            c.name = p(c.name);
            c
        }));
        if self.rows.is_empty() {
            self.rows = other.rows;
        }
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("t,value,bound,ratio\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{},{}",
                r.t,
                r.value,
                opt(r.bound),
                opt(r.ratio())
            );
        }
        out
    }

    pub fn json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            #[serde(flatten)]
            report: &'a Report,
            pass: bool,
        }
        let mut s = serde_json::to_string_pretty(&Summary {
            report: self,
            pass: self.pass(),
        })
        .expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `<dir>/<experiment>.csv` and `<dir>/<experiment>.json`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let csv = dir.join(format!("{}.csv", self.experiment));
        let json = dir.join(format!("{}.json", self.experiment));
        std::fs::write(&csv, self.csv())
            .map_err(|e| Error::Io(format!("{}: {e}", csv.display())))?;
        std::fs::write(&json, self.json())
            .map_err(|e| Error::Io(format!("{}: {e}", json.display())))?;
        Ok((csv, json))
    }
}
