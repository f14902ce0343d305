use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::io::{write_atomic, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremTag {
    #[serde(rename = "T1-intersection")]
    Intersection,
    #[serde(rename = "C4.1-motion")]
    Motion,
    #[serde(rename = "T4.3-packing")]
    Packing,
    #[serde(rename = "T5.1-product")]
    Product,
    #[serde(rename = "L3.2-invariance")]
    Invariance,
    #[serde(rename = "T3.4-chain")]
    Chain,
    #[serde(rename = "P2S-probe")]
    PointToSet,
}

impl TheoremTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremTag::Intersection => "T1-intersection",
            TheoremTag::Motion => "C4.1-motion",
            TheoremTag::Packing => "T4.3-packing",
            TheoremTag::Product => "T5.1-product",
            TheoremTag::Invariance => "L3.2-invariance",
            TheoremTag::Chain => "T3.4-chain",
            TheoremTag::PointToSet => "P2S-probe",
        }
    }
}

/// A reported number with the scale range and thickening it was computed at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
    pub r_min: u32,
    pub r_max: u32,
    pub delta: Option<f64>,
}

impl NamedValue {
    pub fn new(name: impl Into<String>, value: f64, r: (u32, u32), delta: Option<f64>) -> Self {
        Self {
            name: name.into(),
            value,
            r_min: r.0,
            r_max: r.1,
            delta,
        }
    }
}

/// A side condition checked alongside the violation count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Outcome at one thickening of a swept campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub delta: f64,
    pub nonempty: usize,
    pub violations: usize,
    pub max_estimate: f64,
    pub pass: bool,
}

/// One line of the plot-data sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRow {
    pub index: usize,
    pub delta: f64,
    pub estimate: f64,
    pub bound: f64,
    pub empty: bool,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub theorem_tag: TheoremTag,
    pub samples: usize,
    pub estimates: Vec<NamedValue>,
    pub bound: f64,
    pub violations: usize,
    pub tolerance: f64,
    pub allowed_fraction: f64,
    /// `None` for report-only probes.
    pub pass: Option<bool>,
    pub checks: Vec<Check>,
    pub sweep: Vec<SweepEntry>,
    pub provenance: Provenance,
    #[serde(skip)]
    pub rows: Vec<SampleRow>,
}

impl ExperimentReport {
    pub fn violation_fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.violations as f64 / self.samples as f64
        }
    }

    pub fn checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Violation budget met and every side check passed.
    pub fn succeeded(&self) -> bool {
        self.pass.unwrap_or(true) && self.checks_pass()
    }

    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.estimates.iter().find(|e| e.name == name).map(|e| e.value)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `index,delta,estimate,bound,empty,violation`, preceded by `#` provenance lines.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for line in self.provenance.to_text().lines() {
            s.push_str(&format!("# {line}\n"));
        }
        s.push_str("index,delta,estimate,bound,empty,violation\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.index, r.delta, r.estimate, r.bound, r.empty as u8, r.violation as u8
            ));
        }
        s
    }

    /// Writes `<stem>.json` and `<stem>.csv` atomically.
    pub fn write(&self, json_path: &Path) -> Result<()> {
        write_atomic(json_path, self.to_json().as_bytes())?;
        write_atomic(&json_path.with_extension("csv"), self.to_csv().as_bytes())
    }

    pub fn summary_line(&self, command: &str) -> String {
        let value = self
            .estimates
            .first()
            .map(|e| e.value)
            .unwrap_or(f64::NAN);
        let status = match self.pass {
            None => "REPORT",
            Some(_) if self.succeeded() => "PASS",
            Some(_) => "FAIL",
        };
        format!(
            "{command} {} value={value:.4} bound={:.4} violations={}/{} status={status}",
            self.name, self.bound, self.violations, self.samples
        )
    }
}

pub(crate) fn budget_pass(violations: usize, samples: usize, allowed_fraction: f64) -> bool {
    samples == 0 || violations as f64 <= allowed_fraction * samples as f64 + 1e-12
}
