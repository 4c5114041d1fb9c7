//! Run reports: everything a run needs to be replayed and audited, emitted
//! as JSON on stdout. Values are rounded to 12 significant digits so equal
//! runs serialize identically; wall time is kept in a separate field.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use nonbilocal_core::measures::{MeasureResult, OptimizerConfig};
use nonbilocal_core::statespec::StateSpec;

/// Rounds to 12 significant digits, the report/CSV print precision.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub restarts: usize,
    pub refine_iters: usize,
    pub step_tolerance: f64,
    pub value_tolerance: f64,
    pub seed: u64,
}

impl From<&OptimizerConfig> for ConfigEcho {
    fn from(c: &OptimizerConfig) -> Self {
        Self {
            restarts: c.restarts,
            refine_iters: c.refine_iters,
            step_tolerance: c.step_tolerance,
            value_tolerance: c.value_tolerance,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartEcho {
    pub label: String,
    pub initial: f64,
    pub converged: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub expected: String,
    pub observed: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: ConfigEcho,
    pub inputs: Vec<StateSpec>,
    pub values: BTreeMap<String, f64>,
    pub assertions: Vec<Assertion>,
    pub starts: Vec<StartEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_measurement: Option<String>,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn new(command: &str, config: &OptimizerConfig) -> Self {
        Self {
            command: command.to_string(),
            config: config.into(),
            inputs: Vec::new(),
            values: BTreeMap::new(),
            assertions: Vec::new(),
            starts: Vec::new(),
            optimal_measurement: None,
            wall_time_ms: 0,
        }
    }

    pub fn record(&mut self, key: &str, value: f64) {
        self.values.insert(key.to_string(), sig12(value));
    }

    pub fn record_starts(&mut self, result: &MeasureResult) {
        for s in &result.starts {
            self.starts.push(StartEcho {
                label: s.label.clone(),
                initial: sig12(s.initial),
                converged: sig12(s.converged),
            });
        }
    }

    pub fn assert_close(&mut self, name: &str, observed: f64, expected: f64, tol: f64) {
        self.assertions.push(Assertion {
            name: name.to_string(),
            expected: format!("{} within {tol:e}", sig12(expected)),
            observed: sig12(observed),
            pass: (observed - expected).abs() <= tol,
        });
    }

    pub fn assert_at_least(&mut self, name: &str, observed: f64, threshold: f64) {
        self.assertions.push(Assertion {
            name: name.to_string(),
            expected: format!(">= {}", sig12(threshold)),
            observed: sig12(observed),
            pass: observed >= threshold,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn emit(&self) {
        println!(
            "{}",
            serde_json::to_string_pretty(self).expect("report serialization")
        );
    }
}

/// FNV-1a over the little-endian bytes of a float sequence; used to tag
/// sweep inputs in CSV rows.
pub fn fnv1a_hash(parts: impl IntoIterator<Item = f64>) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for x in parts {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_rounds_to_twelve_significant_digits() {
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(sig12(0.75), 0.75);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(-1.23456789012345e-7), -1.23456789012e-7);
    }

    #[test]
    fn fnv_hash_is_order_sensitive_and_stable() {
        let a = fnv1a_hash([1.0, 2.0]);
        let b = fnv1a_hash([2.0, 1.0]);
        assert_ne!(a, b);
        assert_eq!(a, fnv1a_hash([1.0, 2.0]));
    }

    #[test]
    fn report_round_trips_through_json() {
        let config = OptimizerConfig::default();
        let mut report = RunReport::new("min --measure hs_min", &config);
        report.inputs.push(StateSpec::builtin("bell_phi_plus"));
        report.record("value", 0.5);
        report.assert_close("value", 0.5, 0.5, 1e-6);
        report.starts.push(StartEcho {
            label: "eigen".into(),
            initial: 0.5,
            converged: 0.5,
        });
        report.wall_time_ms = 12;
        let text = serde_json::to_string(&report).unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.command, report.command);
        assert_eq!(back.values["value"], 0.5);
        assert!(back.all_pass());
        assert_eq!(back.wall_time_ms, 12);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn failed_assertions_flip_all_pass() {
        let mut report = RunReport::new("x", &OptimizerConfig::default());
        report.assert_at_least("m", 0.1, 0.2);
        assert!(!report.all_pass());
    }
}
