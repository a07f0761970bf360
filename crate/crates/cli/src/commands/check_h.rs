//! `check-h`: evaluate the conjugate-integrability condition for a penalty,
//! a schedule, and a list of directions. Exit 0 only when every direction
//! gets a finite verdict; divergent beats inconclusive in the exit code.

use std::io::Write;
use std::path::PathBuf;

use penalty_flow::diagnostics::{condition_h_check, condition_h_integrand, HVerdict};
use penalty_flow::ExtReal;

use crate::config::{load, CheckHConfig};
use crate::{commands, CliError};
use commands::{EXIT_INCONCLUSIVE, EXIT_OK, EXIT_VERDICT_FAILURE};

pub struct CheckHArgs {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub tmax: Option<f64>,
}

pub fn cmd_check_h(args: &CheckHArgs) -> Result<i32, CliError> {
    let cfg: CheckHConfig = load(&args.config)?;
    let psi = cfg.psi.build()?;
    let schedule = cfg.schedule.build()?;
    let t_max = args.tmax.or(cfg.t_max).unwrap_or(1e4);
    if cfg.p_vectors.is_empty() {
        return Err(CliError::execution("p_vectors must not be empty".into()));
    }

    let mut reports = Vec::with_capacity(cfg.p_vectors.len());
    for p in &cfg.p_vectors {
        let report = condition_h_check(&psi, &schedule, p, t_max)?;
        let exponent = report
            .tail_exponent
            .map(|e| format!("{e:.4}"))
            .unwrap_or_else(|| "n/a".into());
        println!(
            "p={p:?} verdict={:?} mode={:?} value={} tail_exponent={exponent}{}",
            report.verdict,
            report.mode,
            report.value,
            report
                .divergence_location
                .map(|t| format!(" divergent_at={t:.6}"))
                .unwrap_or_default(),
        );
        reports.push(report);
    }

    if let Some(dir) = &args.out {
        commands::ensure_dir(dir)?;
        commands::write_json(&dir.join("condition_h.json"), &reports)?;
        // integrand dumps for plotting, one file per direction
        for (i, p) in cfg.p_vectors.iter().enumerate() {
            let path = dir.join(format!("condition_h_integrand_{i}.csv"));
            let file = std::fs::File::create(&path)
                .map_err(|e| CliError::execution(format!("create {}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            (|| -> std::io::Result<()> {
                writeln!(w, "t,integrand")?;
                let samples = 2000usize;
                for j in 0..=samples {
                    let t = t_max * j as f64 / samples as f64;
                    match condition_h_integrand(&psi, &schedule, p, t) {
                        Ok(ExtReal::Finite(g)) => writeln!(w, "{t},{g}")?,
                        Ok(ExtReal::PosInf) => writeln!(w, "{t},+inf")?,
                        Err(_) => writeln!(w, "{t},nan")?,
                    }
                }
                Ok(())
            })()
            .map_err(|e| CliError::execution(format!("write {}: {e}", path.display())))?;
        }
    }

    let any_divergent = reports.iter().any(|r| r.verdict == HVerdict::Divergent);
    let any_inconclusive = reports.iter().any(|r| r.verdict == HVerdict::Inconclusive);
    Ok(if any_divergent {
        EXIT_VERDICT_FAILURE
    } else if any_inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    })
}
