//! Criteria, comparison tables and the artifacts written for every experiment.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::path::Path;

use serde::Serialize;

use crate::analysis::{write_reports_csv, EnergyReport};
use crate::error::Result;
use crate::material::CoefTensor;
use crate::solver::{write_checkpoint, Checkpoint};

/// How a criterion compares its measured value with its limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "op")]
pub enum Check {
    AtMost { limit: f64 },
    AtLeast { limit: f64 },
    Within { lo: f64, hi: f64 },
}

impl Check {
    /// A NaN value never passes.
    pub fn holds(&self, value: f64) -> bool {
        match *self {
            Check::AtMost { limit } => value <= limit,
            Check::AtLeast { limit } => value >= limit,
            Check::Within { lo, hi } => value >= lo && value <= hi,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Check::AtMost { limit } => write!(f, "<= {limit:.6e}"),
            Check::AtLeast { limit } => write!(f, ">= {limit:.6e}"),
            Check::Within { lo, hi } => write!(f, "in [{lo:.6e}, {hi:.6e}]"),
        }
    }
}

/// One measured number with its pass rule; the verdict is recomputed from both.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub value: f64,
    pub check: Check,
    pub passed: bool,
}

impl Criterion {
    pub fn new(name: impl Into<String>, value: f64, check: Check) -> Self {
        Criterion {
            name: name.into(),
            value,
            passed: check.holds(value),
            check,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value, Check::AtMost { limit })
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value, Check::AtLeast { limit })
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, value, Check::Within { lo, hi })
    }

    /// A yes/no event recorded as 1 (happened) or 0.
    pub fn flag(name: impl Into<String>, happened: bool, expected: bool) -> Self {
        let v = if happened { 1.0 } else { 0.0 };
        if expected {
            Self::at_least(name, v, 1.0)
        } else {
            Self::at_most(name, v, 0.0)
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {:.6e} {}", self.verdict(), self.name, self.value, self.check)
    }
}

/// Rows of numbers under named columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ComparisonTable {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        ComparisonTable {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Errors at increasing resolution with `log2(e_coarse / e_fine)` orders;
    /// the first row has no order.
    pub fn refinement(title: impl Into<String>, resolutions: &[usize], errors: &[f64]) -> Self {
        let mut t = Self::new(title, &["resolution", "error", "observed_order"]);
        for (i, (&n, &e)) in resolutions.iter().zip(errors).enumerate() {
            let order = if i == 0 { f64::NAN } else { (errors[i - 1] / e).log2() };
            t.push(vec![n as f64, e, order]);
        }
        t
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }
}

/// Everything one experiment produced.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Outcome {
    pub experiment: String,
    pub seed: u64,
    pub criteria: Vec<Criterion>,
    pub metrics: BTreeMap<String, f64>,
    pub tables: Vec<ComparisonTable>,
    pub notes: Vec<String>,
    /// Report series by file stem; the main run is `report`.
    #[serde(skip)]
    pub reports: Vec<(String, Vec<EnergyReport>)>,
    #[serde(skip)]
    pub tensor: Option<CoefTensor>,
    /// Last two levels of the main run.
    #[serde(skip)]
    pub final_state: Option<Checkpoint>,
}

impl Outcome {
    pub fn new(experiment: &str, seed: u64) -> Self {
        Outcome {
            experiment: experiment.to_string(),
            seed,
            ..Outcome::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    pub fn push(&mut self, c: Criterion) {
        log::info!("{c}");
        self.criteria.push(c);
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// One line per criterion.
    pub fn summary_lines(&self) -> Vec<String> {
        self.criteria
            .iter()
            .map(|c| format!("{} {}", self.experiment, c))
            .collect()
    }

    pub fn add_reports(&mut self, stem: &str, reports: Vec<EnergyReport>) {
        self.reports.push((stem.to_string(), reports));
    }

    /// Writes `summary.json`, one CSV per report series, `tensor.json` when a
    /// tensor was used and `final.ckpt` when a final state was kept.
    pub fn write_artifacts(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let summary = serde_json::json!({
            "experiment": self.experiment,
            "seed": self.seed,
            "passed": self.passed(),
            "criteria": self.criteria,
            "metrics": self.metrics,
            "tables": self.tables,
            "notes": self.notes,
        });
        std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
        for (stem, reports) in &self.reports {
            write_reports_csv(reports, File::create(dir.join(format!("{stem}.csv")))?)?;
        }
        if let Some(t) = &self.tensor {
            std::fs::write(dir.join("tensor.json"), t.to_json()? + "\n")?;
        }
        if let Some(c) = &self.final_state {
            write_checkpoint(&dir.join("final.ckpt"), c.t, c.dt, &c.levels)?;
        }
        Ok(())
    }
}
