use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

/// Bumped whenever a field is removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub input: Value,
    /// Seed of every randomized part of the run, when there is one.
    pub seed: Option<u64>,
    pub results: Value,
    pub timing: Timing,
    pub violations: Vec<String>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Timing {
    pub wall_ms: f64,
}

impl ReportDocument {
    pub fn new(command: &str, input: Value, seed: Option<u64>) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool: "specint",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            input,
            seed,
            results: Value::Null,
            timing: Timing { wall_ms: 0.0 },
            violations: Vec::new(),
        }
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.timing.wall_ms = elapsed.as_secs_f64() * 1e3;
    }

    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }
}
