pub mod check_h;
pub mod compare;
pub mod run;
pub mod sweep;

use std::path::Path;

use penalty_flow::descriptor::ProblemDescriptor;
use penalty_flow::dynamics::ProblemInstance;

use crate::config::RunConfig;
use crate::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERDICT_FAILURE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Resolve the configured problem and apply a schedule override.
pub fn resolve_problem(cfg: &RunConfig) -> Result<(ProblemInstance, String), CliError> {
    let name = match &cfg.problem {
        ProblemDescriptor::Named(n) => n.clone(),
        ProblemDescriptor::Inline(_) => "inline".to_string(),
    };
    let mut instance = cfg.problem.build()?;
    if let Some(sched) = &cfg.schedule {
        instance.schedule = sched.build()?;
    }
    Ok((instance, name))
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::execution(format!("cannot create {}: {e}", path.display())))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::execution(format!("serialize {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::execution(format!("write {}: {e}", path.display())))
}
