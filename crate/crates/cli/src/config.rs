//! JSON config files for the CLI commands. Unknown keys are rejected so a
//! typo in a hypothesis toggle fails the run instead of silently changing it.

use std::path::{Path, PathBuf};

use penalty_flow::descriptor::{PenaltyDescriptor, ProblemDescriptor, ScheduleDescriptor};
use penalty_flow::dynamics::{IntegratorConfig, Method};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodSetting>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_infeasible_growth: Option<bool>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MethodSetting {
    Dopri45,
    Rk4Fixed { step: f64 },
}

impl IntegratorSettings {
    pub fn build(&self, t_end_flag: Option<f64>) -> IntegratorConfig {
        let t_end = t_end_flag.or(self.t_end).unwrap_or(100.0);
        let mut cfg = IntegratorConfig::adaptive(t_end);
        if let Some(m) = self.method {
            cfg.method = match m {
                MethodSetting::Dopri45 => Method::Dopri45,
                MethodSetting::Rk4Fixed { step } => Method::Rk4Fixed { step },
            };
        }
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.max_step {
            cfg.max_step = v;
        }
        if let Some(v) = self.initial_step {
            cfg.initial_step = v;
        }
        if let Some(v) = self.sample_count {
            cfg.sample_count = v;
        }
        if let Some(v) = self.allow_infeasible_growth {
            cfg.allow_infeasible_growth = v;
        }
        cfg
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSettings {
    /// Extra directions for the integrability check, beyond the default
    /// −∇φ(z) when an optimum is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_h_p_vectors: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_h_t_max: Option<f64>,
    /// Scan the composite/descent inequalities (needs a certified optimum).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check_inequalities: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cauchy_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oscillation_tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemDescriptor,
    /// Replaces the problem's schedule when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleDescriptor>,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default)]
    pub diagnostics: DiagnosticsSettings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckHConfig {
    pub psi: PenaltyDescriptor,
    pub schedule: ScheduleDescriptor,
    pub p_vectors: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub problem: ProblemDescriptor,
    pub gammas: Vec<f64>,
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// Parse a JSON config with the offending field named on error.
pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::execution(format!("cannot read config {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        CliError::execution(format!(
            "malformed config {} at field '{}': {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })
}
