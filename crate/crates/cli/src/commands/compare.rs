//! `compare`: integrate the second-order system and its first-order
//! baseline on one problem and report whether both reach the same limit.

use std::path::PathBuf;

use penalty_flow::dynamics::{integrate, SystemKind, Trajectory};
use penalty_flow::vecmath::{dist, norm};
use serde::Serialize;

use crate::config::{load, RunConfig};
use crate::{commands, CliError};
use commands::{run::write_trajectory_csv, EXIT_OK, EXIT_VERDICT_FAILURE};

pub struct CompareArgs {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub tmax: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Serialize)]
struct SystemSummary {
    terminal_x: Vec<f64>,
    terminal_speed: f64,
    terminal_phi: f64,
    terminal_beta_psi: f64,
    distance_to_optimum: Option<f64>,
    steps_accepted: usize,
    steps_rejected: usize,
}

#[derive(Serialize)]
struct CompareReport {
    problem: String,
    t_end: f64,
    tolerance: f64,
    second_order: SystemSummary,
    first_order: SystemSummary,
    terminal_distance_between: f64,
    pass: bool,
}

fn summarize(traj: &Trajectory, z: Option<&[f64]>) -> SystemSummary {
    let end = traj.terminal();
    SystemSummary {
        terminal_x: end.x.clone(),
        terminal_speed: norm(&end.v),
        terminal_phi: end.phi,
        terminal_beta_psi: end.beta * end.psi,
        distance_to_optimum: z.map(|z| dist(&end.x, z)),
        steps_accepted: traj.stats.steps_accepted,
        steps_rejected: traj.stats.steps_rejected,
    }
}

pub fn cmd_compare(args: &CompareArgs) -> Result<i32, CliError> {
    let cfg: RunConfig = load(&args.config)?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    commands::ensure_dir(&out_dir)?;

    let (problem, name) = commands::resolve_problem(&cfg)?;
    let int_cfg = cfg.integrator.build(args.tmax);
    let tolerance = args.tol.unwrap_or(1e-2);

    let second = integrate(&problem, &int_cfg, SystemKind::SecondOrder)
        .map_err(|e| CliError::execution(format!("second-order: {e}")))?;
    let first = integrate(&problem, &int_cfg, SystemKind::FirstOrder)
        .map_err(|e| CliError::execution(format!("first-order: {e}")))?;

    write_trajectory_csv(&out_dir.join("trajectory_second_order.csv"), &second)?;
    write_trajectory_csv(&out_dir.join("trajectory_first_order.csv"), &first)?;

    let z = problem.analytic_solution.as_deref();
    let between = dist(&second.terminal().x, &first.terminal().x);
    let s2 = summarize(&second, z);
    let s1 = summarize(&first, z);
    // both limits must agree with each other and, when known, with z*
    let mut pass = between <= tolerance;
    for s in [&s2, &s1] {
        if let Some(d) = s.distance_to_optimum {
            pass &= d <= tolerance;
        }
    }

    let report = CompareReport {
        problem: name,
        t_end: int_cfg.t_end,
        tolerance,
        second_order: s2,
        first_order: s1,
        terminal_distance_between: between,
        pass,
    };
    commands::write_json(&out_dir.join("compare.json"), &report)?;
    println!(
        "terminal distance between systems: {between:.3e} (tolerance {tolerance:.1e}) -> {}",
        if pass { "pass" } else { "fail" }
    );

    Ok(if pass { EXIT_OK } else { EXIT_VERDICT_FAILURE })
}
