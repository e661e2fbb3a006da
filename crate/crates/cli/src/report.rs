//! JSON reports with a fixed key order.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use sepcodes::codes::Mode;
use sepcodes::concat::RateReport;

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub mode: String,
    pub result: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    /// Computed quantity for checks that report one (distances, dimensions).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    pub elapsed_ms: u64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.result == "pass"
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool_version: &'static str,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ledger: Option<RateReport>,
}

/// What a single check produced.
pub struct Outcome {
    pub mode: String,
    pub passed: bool,
    pub witness: Option<Value>,
    pub value: Option<Value>,
}

impl Outcome {
    pub fn exact(passed: bool) -> Outcome {
        Outcome { mode: Mode::Exhaustive.to_string(), passed, witness: None, value: None }
    }

    pub fn verdict<W: Serialize>(mode: Mode, witness: Option<W>) -> Outcome {
        let passed = witness.is_none();
        Outcome {
            mode: mode.to_string(),
            passed,
            witness: witness.map(|w| serde_json::to_value(w).expect("serializable witness")),
            value: None,
        }
    }

    pub fn with_value(mut self, v: impl Serialize) -> Outcome {
        self.value = Some(serde_json::to_value(v).expect("serializable value"));
        self
    }
}

impl Report {
    pub fn new(seed: u64) -> Report {
        Report { tool_version: env!("CARGO_PKG_VERSION"), seed, checks: Vec::new(), ledger: None }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    /// Runs one check and records it; `timings = false` records zero elapsed time.
    pub fn run(
        &mut self,
        name: &str,
        timings: bool,
        f: impl FnOnce() -> anyhow::Result<Outcome>,
    ) -> anyhow::Result<bool> {
        let start = Instant::now();
        let out = f()?;
        let elapsed_ms = if timings { start.elapsed().as_millis() as u64 } else { 0 };
        self.checks.push(CheckResult {
            name: name.to_string(),
            mode: out.mode,
            result: if out.passed { "pass" } else { "fail" },
            witness: out.witness,
            value: out.value,
            elapsed_ms,
        });
        Ok(out.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report") + "\n"
    }
}
