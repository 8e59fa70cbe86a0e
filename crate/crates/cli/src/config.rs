// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON run configuration. Every section and field is optional; command-line
//! flags override values read from the file.

use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use trackmap::estimation::{ContinuityWeights, LmConfig};
use trackmap::pipeline::OptimizeOptions;
use trackmap::simulation::SimConfig;
use trackmap::trackmap::EmissionThreshold;

use crate::EndRuleArg;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub simulation: SimConfig,
    pub solver: LmConfig,
    pub continuity: ContinuityConfig,
    pub emission: EmissionConfig,
    pub end_rule: EndRuleArg,
    pub evaluation: EvaluationConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            simulation: SimConfig::default(),
            solver: LmConfig::default(),
            continuity: ContinuityConfig::default(),
            emission: EmissionConfig::default(),
            end_rule: EndRuleArg::SteadyRate,
            evaluation: EvaluationConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuityConfig {
    pub position_sigma_m: f64,
    pub heading_sigma_rad: f64,
    /// Measurement information, 1/m², at which gap rows equal gap / sigma.
    pub reference_information: f64,
}

impl Default for ContinuityConfig {
    fn default() -> Self {
        let w = ContinuityWeights::<f64>::default();
        ContinuityConfig {
            position_sigma_m: w.position_sigma,
            heading_sigma_rad: w.heading_sigma,
            reference_information: w.reference_information,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmissionConfig {
    pub max_gap_m: f64,
    pub max_heading_gap_rad: f64,
}

impl Default for EmissionConfig {
    fn default() -> Self {
        let t = EmissionThreshold::<f64>::default();
        EmissionConfig {
            max_gap_m: t.position,
            max_heading_gap_rad: t.heading,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    /// Sampling step along the candidate.
    pub step_m: f64,
    /// Spacing of the data-point map.
    pub baseline_spacing_m: f64,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            step_m: 1.0,
            baseline_spacing_m: 1.0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.simulation.validate()?;
        let positive = [
            ("solver.tau", self.solver.tau),
            ("solver.relative_step_tolerance", self.solver.relative_step_tolerance),
            ("solver.fd_step", self.solver.fd_step),
            ("continuity.position_sigma_m", self.continuity.position_sigma_m),
            ("continuity.heading_sigma_rad", self.continuity.heading_sigma_rad),
            (
                "continuity.reference_information",
                self.continuity.reference_information,
            ),
            ("emission.max_gap_m", self.emission.max_gap_m),
            ("emission.max_heading_gap_rad", self.emission.max_heading_gap_rad),
            ("evaluation.step_m", self.evaluation.step_m),
            ("evaluation.baseline_spacing_m", self.evaluation.baseline_spacing_m),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                bail!("{name} must be positive, got {v}");
            }
        }
        if !(self.solver.nu.is_finite() && self.solver.nu > 1.0) {
            bail!("solver.nu must be greater than 1, got {}", self.solver.nu);
        }
        if !(self.solver.gradient_tolerance.is_finite() && self.solver.gradient_tolerance >= 0.0) {
            bail!(
                "solver.gradient_tolerance must be >= 0, got {}",
                self.solver.gradient_tolerance
            );
        }
        Ok(())
    }

    pub fn optimize_options(&self) -> OptimizeOptions<f64> {
        OptimizeOptions {
            lm: self.solver,
            continuity: ContinuityWeights {
                position_sigma: self.continuity.position_sigma_m,
                heading_sigma: self.continuity.heading_sigma_rad,
                reference_information: self.continuity.reference_information,
            },
            threshold: EmissionThreshold {
                position: self.emission.max_gap_m,
                heading: self.emission.max_heading_gap_rad,
            },
            ends: self.end_rule.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let c: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn unknown_field_is_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"solver":{"taux":1}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"extra":1}"#).is_err());
    }

    #[test]
    fn partial_section_keeps_other_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"solver":{"max_iterations":5},"end_rule":"solver"}"#).unwrap();
        assert_eq!(c.solver.max_iterations, 5);
        assert_eq!(c.solver.tau, 1e-3);
        assert_eq!(c.end_rule, EndRuleArg::Solver);
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut c = RunConfig::default();
        c.emission.max_gap_m = 0.0;
        assert!(c.validate().is_err());
    }
}
