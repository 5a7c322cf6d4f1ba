//! Structured result records shared by the verification drivers and the
//! command-line front end. Everything here is serde-serializable and
//! deterministic for fixed inputs.

use serde::{Deserialize, Serialize};

/// Verdict of a grid-based estimate verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateVerdict {
    Bounded,
    Violated,
}

/// Observed ratio band of a two-sided or one-sided kernel estimate over a
/// grid, with the witnesses attaining the extremes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateReport {
    pub grid: String,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub verdict: EstimateVerdict,
    /// (t, x, y) attaining the minimum ratio.
    pub witness_min: (f64, f64, f64),
    /// (t, x, y) attaining the maximum ratio.
    pub witness_max: (f64, f64, f64),
    /// Extremes after one grid refinement, when the check performs one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined: Option<(f64, f64)>,
    /// Relative drift of the supremum under refinement.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement_drift: Option<f64>,
}

impl EstimateReport {
    pub fn is_bounded(&self) -> bool {
        self.verdict == EstimateVerdict::Bounded
    }
}

/// One named check with an observed value against a threshold.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub observed: f64,
    pub threshold: f64,
    /// "<=", ">=" or "band" — how `observed` relates to `threshold`.
    pub comparison: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    pub fn le(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.into(),
            observed,
            threshold,
            comparison: "<=".to_string(),
            passed: observed <= threshold,
            detail: None,
        }
    }

    pub fn ge(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.into(),
            observed,
            threshold,
            comparison: ">=".to_string(),
            passed: observed >= threshold,
            detail: None,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            observed: if passed { 1.0 } else { 0.0 },
            threshold: 1.0,
            comparison: ">=".to_string(),
            passed,
            detail: Some(detail.into()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// A free-form titled collection of checks (weight-class demos, scaffold
/// assembly reports, …).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}
