//! `sweep`: map the growth-feasibility frontier empirically over a
//! (gamma, alpha) grid. Cells are independent and fan out to a worker pool;
//! infeasible cells are flagged and not integrated.

use std::io::Write;
use std::path::PathBuf;

use penalty_flow::dynamics::{integrate, IntegratorConfig, ProblemInstance, SystemKind};
use penalty_flow::schedule::{verify_growth, PenaltySchedule};
use penalty_flow::vecmath::dist;
use rayon::prelude::*;

use crate::config::{load, SweepConfig};
use crate::{commands, CliError};
use commands::{EXIT_ERROR, EXIT_OK};

pub struct SweepArgs {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub tmax: Option<f64>,
    pub workers: Option<usize>,
}

struct Cell {
    gamma: f64,
    alpha: f64,
    feasible: bool,
    k_min: f64,
    terminal_distance: Option<f64>,
    error: Option<String>,
}

fn run_cell(
    base: &ProblemInstance,
    gamma: f64,
    alpha: f64,
    int_cfg: &IntegratorConfig,
) -> Cell {
    let schedule = match PenaltySchedule::power(alpha) {
        Ok(s) => s,
        Err(e) => {
            return Cell {
                gamma,
                alpha,
                feasible: false,
                k_min: f64::NAN,
                terminal_distance: None,
                error: Some(e.to_string()),
            }
        }
    };
    let growth = match verify_growth(&schedule, gamma, 0.0, &[]) {
        Ok(g) => g,
        Err(e) => {
            return Cell {
                gamma,
                alpha,
                feasible: false,
                k_min: f64::NAN,
                terminal_distance: None,
                error: Some(e.to_string()),
            }
        }
    };
    if !growth.feasible {
        return Cell {
            gamma,
            alpha,
            feasible: false,
            k_min: growth.k_min,
            terminal_distance: None,
            error: None,
        };
    }
    let instance = match ProblemInstance::new(
        base.phi.clone(),
        base.psi.clone(),
        gamma,
        schedule,
        base.u0.clone(),
        base.v0.clone(),
    ) {
        Ok(p) => p,
        Err(e) => {
            return Cell {
                gamma,
                alpha,
                feasible: true,
                k_min: growth.k_min,
                terminal_distance: None,
                error: Some(e.to_string()),
            }
        }
    };
    match integrate(&instance, int_cfg, SystemKind::SecondOrder) {
        Ok(traj) => {
            let d = base
                .analytic_solution
                .as_ref()
                .map(|z| dist(&traj.terminal().x, z));
            Cell {
                gamma,
                alpha,
                feasible: true,
                k_min: growth.k_min,
                terminal_distance: d,
                error: None,
            }
        }
        Err(e) => Cell {
            gamma,
            alpha,
            feasible: true,
            k_min: growth.k_min,
            terminal_distance: None,
            error: Some(e.to_string()),
        },
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<i32, CliError> {
    let cfg: SweepConfig = load(&args.config)?;
    if cfg.gammas.is_empty() || cfg.alphas.is_empty() {
        eprintln!("sweep grid is empty");
        return Ok(EXIT_ERROR);
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    commands::ensure_dir(&out_dir)?;

    let base = cfg.problem.build()?;
    let int_cfg = cfg.integrator.build(args.tmax);

    let grid: Vec<(f64, f64)> = cfg
        .gammas
        .iter()
        .flat_map(|&g| cfg.alphas.iter().map(move |&a| (g, a)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers.unwrap_or(0)) // 0 = all available units
        .build()
        .map_err(|e| CliError::execution(format!("worker pool: {e}")))?;
    let cells: Vec<Cell> = pool.install(|| {
        grid.par_iter()
            .map(|&(gamma, alpha)| run_cell(&base, gamma, alpha, &int_cfg))
            .collect()
    });

    let path = out_dir.join("sweep.csv");
    let file = std::fs::File::create(&path)
        .map_err(|e| CliError::execution(format!("create {}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(w, "gamma,alpha,feasible,k_min,terminal_distance,error")?;
        for c in &cells {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                c.gamma,
                c.alpha,
                c.feasible,
                c.k_min,
                c.terminal_distance
                    .map(|d| d.to_string())
                    .unwrap_or_default(),
                c.error.as_deref().unwrap_or_default()
            )?;
        }
        Ok(())
    })()
    .map_err(|e| CliError::execution(format!("write {}: {e}", path.display())))?;

    if cells.iter().any(|c| c.error.is_some()) {
        eprintln!("some sweep cells failed; see sweep.csv");
        return Ok(EXIT_ERROR);
    }
    println!(
        "swept {} cells ({} feasible) -> {}",
        cells.len(),
        cells.iter().filter(|c| c.feasible).count(),
        path.display()
    );
    Ok(EXIT_OK)
}
