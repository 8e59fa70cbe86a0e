// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Per-run manifest written next to the outputs.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct SolverSummary {
    pub termination: String,
    pub converged: bool,
    pub iterations: usize,
    pub accepted_iterations: usize,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub measurement_cost: f64,
    pub continuity_cost: f64,
    pub max_gap_m: f64,
    pub max_heading_gap_rad: f64,
}

/// Wall-clock data, kept apart so the rest of the manifest is reproducible.
#[derive(Debug, Serialize)]
pub struct Timing {
    pub started_unix_s: u64,
    pub duration_s: f64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSummary>,
    pub warnings: Vec<String>,
    pub timing: Timing,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: 0,
            config: serde_json::Value::Null,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            solver: None,
            warnings: Vec::new(),
            timing: Timing {
                started_unix_s: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
                duration_s: 0.0,
            },
        }
    }

    pub fn input(&mut self, role: &str, path: &Path) {
        self.inputs.insert(role.to_string(), path.display().to_string());
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn finish(&mut self, started: Instant) {
        self.timing.duration_s = started.elapsed().as_secs_f64();
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}
