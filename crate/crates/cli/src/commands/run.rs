//! `run`: integrate one configured problem, write trajectory/energy/report
//! artifacts, and gate the exit code on the enabled verdicts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use penalty_flow::diagnostics::{
    condition_h_check, convergence_report, dissipation_residual, energy_series,
    lyapunov_inequality_check, ConditionHReport, ConvergenceOptions, ConvergenceReport,
    HVerdict, LyapunovReport,
};
use penalty_flow::dynamics::{
    integrate, IntegrateError, IntegrationStats, ProblemInstance, SystemKind, Trajectory,
};
use penalty_flow::schedule::{verify_growth, GrowthReport};
use penalty_flow::vecmath::norm;
use serde::Serialize;

use crate::config::{load, RunConfig};
use crate::plot::{trajectory_chart, Series};
use crate::{commands, CliError};
use commands::{EXIT_OK, EXIT_VERDICT_FAILURE};

pub struct RunArgs {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub tmax: Option<f64>,
    pub tol: Option<f64>,
    pub plot: bool,
}

#[derive(Serialize)]
struct RunReport {
    problem: String,
    system: SystemKind,
    growth: GrowthReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<IntegrationStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_psi_terminal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speed_terminal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_terminal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dissipation_max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    convergence: Option<ConvergenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lyapunov: Option<LyapunovReport>,
    condition_h: Vec<ConditionHReport>,
    pass: bool,
}

pub fn cmd_run(args: &RunArgs) -> Result<i32, CliError> {
    let cfg: RunConfig = load(&args.config)?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    commands::ensure_dir(&out_dir)?;

    let (problem, name) = commands::resolve_problem(&cfg)?;
    let int_cfg = cfg.integrator.build(args.tmax);

    // growth condition gates the run; an infeasible schedule is a verdict
    // failure (exit 2), not an execution error
    let growth = verify_growth(&problem.schedule, problem.gamma, 0.0, &[int_cfg.t_end])?;
    if !growth.feasible && !int_cfg.allow_infeasible_growth {
        let message = format!(
            "H_beta violated: k_min={} >= gamma={}",
            growth.k_min, problem.gamma
        );
        let report = RunReport {
            problem: name,
            system: SystemKind::SecondOrder,
            growth,
            error: Some(message.clone()),
            warnings: Vec::new(),
            stats: None,
            beta_psi_terminal: None,
            speed_terminal: None,
            energy_terminal: None,
            dissipation_max_residual: None,
            convergence: None,
            lyapunov: None,
            condition_h: Vec::new(),
            pass: false,
        };
        commands::write_json(&out_dir.join("report.json"), &report)?;
        eprintln!("{message}");
        return Ok(EXIT_VERDICT_FAILURE);
    }

    let traj = match integrate(&problem, &int_cfg, SystemKind::SecondOrder) {
        Ok(t) => t,
        Err(IntegrateError::Aborted { reason, partial }) => {
            // keep the partial trajectory for post-mortem plots
            write_trajectory_csv(&out_dir.join("trajectory.csv"), &partial)?;
            return Err(CliError::execution(format!("integration aborted: {reason}")));
        }
        Err(e) => return Err(CliError::execution(e.to_string())),
    };

    write_trajectory_csv(&out_dir.join("trajectory.csv"), &traj)?;
    write_energy_csv(&out_dir.join("energy.csv"), &traj)?;

    let mut warnings = Vec::new();
    if !problem.schedule.is_divergent() {
        warnings.push(
            "schedule does not diverge: objective-value and velocity limit conclusions \
             additionally require beta -> infinity"
                .to_string(),
        );
    }

    let opts = ConvergenceOptions {
        epsilon: args.tol.or(cfg.diagnostics.epsilon).unwrap_or(1e-2),
        distance_epsilon: cfg.diagnostics.distance_epsilon.unwrap_or(5e-2),
        cauchy_ratio: cfg.diagnostics.cauchy_ratio.unwrap_or(0.05),
        oscillation_tol: cfg.diagnostics.oscillation_tol.unwrap_or(1e-3),
    };

    let enough_samples = traj.samples.len() >= 3;
    if !enough_samples {
        warnings.push("fewer than 3 output samples: derivative-based diagnostics skipped".into());
    }

    let z = problem.analytic_solution.clone();
    let convergence = match &z {
        Some(z) if enough_samples => Some(convergence_report(&traj, &problem, z, &opts)?),
        _ => None,
    };

    let check_inequalities = cfg
        .diagnostics
        .check_inequalities
        .unwrap_or(z.is_some() && growth.feasible)
        && enough_samples;
    let lyapunov = if check_inequalities {
        match &z {
            Some(z) => Some(lyapunov_inequality_check(
                &traj,
                &problem,
                z,
                growth.k_min.min(0.999 * problem.gamma),
            )?),
            None => {
                warnings.push("inequality checks requested but no optimum is known".into());
                None
            }
        }
    } else {
        None
    };

    let condition_h = run_condition_h(&cfg, &problem, &z, &mut warnings)?;

    let dissipation_max = if enough_samples {
        Some(dissipation_residual(&traj, &problem)?.max_residual)
    } else {
        None
    };
    let end = traj.terminal();

    let mut pass = true;
    if let Some(c) = &convergence {
        pass &= c.all_pass;
    }
    if let Some(l) = &lyapunov {
        pass &= l.composite.pass && l.energy_descent.pass;
    }
    pass &= condition_h.iter().all(|r| r.verdict == HVerdict::Finite);

    let report = RunReport {
        problem: name,
        system: SystemKind::SecondOrder,
        growth,
        error: None,
        warnings,
        stats: Some(traj.stats.clone()),
        beta_psi_terminal: Some(end.beta * end.psi),
        speed_terminal: Some(norm(&end.v)),
        energy_terminal: Some(end.energy()),
        dissipation_max_residual: dissipation_max,
        convergence,
        lyapunov,
        condition_h,
        pass,
    };
    commands::write_json(&out_dir.join("report.json"), &report)?;

    if args.plot {
        std::fs::write(out_dir.join("trajectory.svg"), render_svg(&traj))
            .map_err(|e| CliError::execution(format!("write trajectory.svg: {e}")))?;
    }

    Ok(if pass { EXIT_OK } else { EXIT_VERDICT_FAILURE })
}

fn run_condition_h(
    cfg: &RunConfig,
    problem: &ProblemInstance,
    z: &Option<Vec<f64>>,
    warnings: &mut Vec<String>,
) -> Result<Vec<ConditionHReport>, CliError> {
    let mut p_vectors: Vec<Vec<f64>> = Vec::new();
    if let Some(z) = z {
        // the direction the theory actually uses: −∇φ(z) ∈ ran N
        let g = problem.phi.grad(z)?;
        p_vectors.push(g.iter().map(|v| -v).collect());
    }
    if let Some(extra) = &cfg.diagnostics.condition_h_p_vectors {
        p_vectors.extend(extra.iter().cloned());
    }
    if p_vectors.is_empty() {
        return Ok(Vec::new());
    }
    if !problem.psi.has_conjugate() {
        warnings.push(format!(
            "penalty '{}' has no closed-form conjugate: integrability check skipped",
            problem.psi.base().name()
        ));
        return Ok(Vec::new());
    }
    let t_max = cfg.diagnostics.condition_h_t_max.unwrap_or(1e4);
    let mut reports = Vec::new();
    for p in p_vectors {
        reports.push(condition_h_check(&problem.psi, &problem.schedule, &p, t_max)?);
    }
    Ok(reports)
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let file = File::create(path)
        .map_err(|e| CliError::execution(format!("create {}: {e}", path.display())))?;
    traj.write_csv(BufWriter::new(file))
        .map_err(|e| CliError::execution(format!("write {}: {e}", path.display())))
}

fn write_energy_csv(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let file = File::create(path)
        .map_err(|e| CliError::execution(format!("create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(w, "t,E,kinetic,phi,psi,beta")?;
        for e in energy_series(traj) {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                e.t, e.energy, e.kinetic, e.phi, e.psi, e.beta
            )?;
        }
        Ok(())
    })()
    .map_err(|e| CliError::execution(format!("write {}: {e}", path.display())))
}

fn render_svg(traj: &Trajectory) -> String {
    let n = traj.dimension();
    let coords: Vec<Series> = (0..n)
        .map(|i| Series {
            label: format!("x_{i}"),
            points: traj.samples.iter().map(|s| (s.t, s.x[i])).collect(),
        })
        .collect();
    let diagnostics = vec![
        Series {
            label: "E".into(),
            points: traj.samples.iter().map(|s| (s.t, s.energy())).collect(),
        },
        Series {
            label: "beta*psi".into(),
            points: traj
                .samples
                .iter()
                .map(|s| (s.t, s.beta * s.psi))
                .collect(),
        },
        Series {
            label: "|v|".into(),
            points: traj.samples.iter().map(|s| (s.t, norm(&s.v))).collect(),
        },
    ];
    trajectory_chart(&coords, &diagnostics)
}
