//! Verification reports and their JSON / terminal renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One trial's contribution to a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub deviation: f64,
    /// Values recorded for inspection only; they never affect `pass`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, f64>,
}

impl TrialRecord {
    pub fn new(trial: usize, deviation: f64) -> Self {
        Self {
            trial,
            deviation,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_owned(), value);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<TrialRecord>,
}

/// Non-finite deviations are reported as `f64::MAX` so they stay
/// representable in JSON and always fail.
fn finite_or_max(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

impl VerificationReport {
    /// `pass` holds iff the worst trial deviation is within `tolerance`.
    pub fn from_trials(
        scenario: &str,
        seed: u64,
        tolerance: f64,
        details: Vec<TrialRecord>,
    ) -> Self {
        let max_deviation = details
            .iter()
            .map(|t| finite_or_max(t.deviation))
            .fold(0.0, f64::max);
        Self {
            scenario: scenario.to_owned(),
            trials: details.len(),
            seed,
            tolerance,
            max_deviation,
            pass: max_deviation <= tolerance,
            error: None,
            details,
        }
    }

    pub fn failed(scenario: &str, trials: usize, seed: u64, tolerance: f64, error: String) -> Self {
        Self {
            scenario: scenario.to_owned(),
            trials,
            seed,
            tolerance,
            max_deviation: f64::MAX,
            pass: false,
            error: Some(error),
            details: Vec::new(),
        }
    }

    /// Copy without per-trial records.
    pub fn summary(&self) -> Self {
        Self {
            details: Vec::new(),
            ..self.clone()
        }
    }

    /// Largest value of a diagnostic across trials, if any trial recorded it.
    pub fn diagnostic_max(&self, key: &str) -> Option<f64> {
        self.details
            .iter()
            .filter_map(|t| t.diagnostics.get(key).copied())
            .reduce(f64::max)
    }

    pub fn diagnostic_min(&self, key: &str) -> Option<f64> {
        self.details
            .iter()
            .filter_map(|t| t.diagnostics.get(key).copied())
            .reduce(f64::min)
    }
}

pub fn all_pass(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

pub fn reports_to_json(reports: &[VerificationReport]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(reports)?;
    s.push('\n');
    Ok(s)
}

pub fn reports_from_json(json: &str) -> Result<Vec<VerificationReport>> {
    Ok(serde_json::from_str(json)?)
}

pub fn render_text(reports: &[VerificationReport]) -> String {
    let width = reports.iter().map(|r| r.scenario.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in reports {
        let _ = write!(
            out,
            "{}  {:<width$}  trials={:<4} seed={:<20} max_dev={:.3e} tol={:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.scenario,
            r.trials,
            r.seed,
            r.max_deviation,
            r.tolerance,
        );
        if let Some(e) = &r.error {
            let _ = write!(out, "  error: {e}");
        }
        out.push('\n');
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let _ = writeln!(out, "{passed}/{} scenarios passed", reports.len());
    out
}
