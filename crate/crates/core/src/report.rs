//! Result record shared by every estimator.

use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Marks set on a report when an estimator stopped for a reason other than
/// convergence.
pub mod flags {
    pub const STAGNATED: &str = "stagnated";
    pub const BUDGET_EXHAUSTED: &str = "budget_exhausted";
    pub const COARSE_STEP: &str = "coarse_step";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub target: String,
    pub p: f64,
    /// Points per axis, for grid-based estimates.
    pub grid: Option<usize>,
    pub best_ratio: f64,
    /// Path of a saved witness, once written.
    pub witness: Option<String>,
    /// Best ratio after each accepted step (nondecreasing for ascent methods).
    pub trace: Vec<f64>,
    pub stderr: Option<f64>,
    pub seed: u64,
    pub wall_time_s: f64,
    pub flags: Vec<String>,
    /// Estimator-specific data (witness instance, per-restart values, …).
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl EstimateReport {
    pub fn new(target: impl Into<String>, p: f64, seed: u64) -> Self {
        Self {
            target: target.into(),
            p,
            grid: None,
            best_ratio: 0.0,
            witness: None,
            trace: Vec::new(),
            stderr: None,
            seed,
            wall_time_s: 0.0,
            flags: Vec::new(),
            details: serde_json::Value::Null,
        }
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    pub fn flag(&mut self, flag: &str) {
        if !self.has_flag(flag) {
            self.flags.push(flag.to_string());
        }
    }

    pub(crate) fn finish(mut self, started: Instant) -> Self {
        self.wall_time_s = started.elapsed().as_secs_f64();
        self
    }
}
