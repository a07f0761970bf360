//! Numerical monitor for the continuous quasi-Fejér arguments.
//!
//! The analysis repeatedly uses: if F is bounded below and Ḟ ≤ G (or
//! F̈ + γḞ ≤ G) with G integrable, then F has a finite limit. On sampled
//! data the monitor checks the differential inequality within discretization
//! tolerance, the Cauchy behavior of ∫G, and the tail oscillation of F. The
//! outcome is at best "limit plausible" — existence of a limit is not a
//! finite-horizon observable.

use serde::Serialize;

use crate::error::{CoreError, Result};

use super::stencil;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitVerdict {
    LimitPlausible,
    Violated,
    Inconclusive,
}

#[derive(Clone, Copy, Debug)]
pub enum FejerOrder {
    /// Ḟ ≤ G.
    First,
    /// F̈ + γḞ ≤ G.
    Second { gamma: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct FejerOptions {
    /// Last-half increment of ∫G must stay below this fraction of the total.
    pub cauchy_ratio: f64,
    /// Fraction of the time span forming the oscillation window.
    pub tail_fraction: f64,
    /// Max−min of F over the tail window must stay below this.
    pub oscillation_tol: f64,
}

impl Default for FejerOptions {
    fn default() -> Self {
        FejerOptions {
            cauchy_ratio: 0.05,
            tail_fraction: 0.1,
            oscillation_tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FejerReport {
    pub verdict: LimitVerdict,
    /// max over interior samples of (differential LHS − G).
    pub max_inequality_violation: f64,
    pub inequality_tolerance: f64,
    pub integral_total: f64,
    pub integral_last_half_increment: f64,
    pub cauchy_ok: bool,
    pub tail_oscillation: f64,
    pub oscillation_ok: bool,
}

/// Assess the quasi-Fejér hypothesis and conclusion on a common grid.
pub fn quasi_fejer_monitor(
    ts: &[f64],
    f: &[f64],
    g: &[f64],
    order: FejerOrder,
    opts: &FejerOptions,
) -> Result<FejerReport> {
    if ts.len() != f.len() || ts.len() != g.len() {
        return Err(CoreError::InvalidDiagnosticInput(format!(
            "grid mismatch: {} times, {} F values, {} G values",
            ts.len(),
            f.len(),
            g.len()
        )));
    }
    let h = stencil::check_uniform_grid(ts)?;

    let (lhs, tolerance): (Vec<f64>, f64) = match order {
        FejerOrder::First => (stencil::d1(f, h), 10.0 * stencil::d1_error_bound(f, h)),
        FejerOrder::Second { gamma } => {
            if !(gamma > 0.0) {
                return Err(CoreError::InvalidDiagnosticInput(
                    "second-order monitor needs gamma > 0".into(),
                ));
            }
            let d1 = stencil::d1(f, h);
            let d2 = stencil::d2(f, h);
            let lhs = d1
                .iter()
                .zip(&d2)
                .map(|(a, b)| b + gamma * a)
                .collect();
            let tol =
                10.0 * (stencil::d2_error_bound(f, h) + gamma * stencil::d1_error_bound(f, h));
            (lhs, tol)
        }
    };
    let max_violation = lhs
        .iter()
        .enumerate()
        .map(|(j, v)| v - g[j + 1])
        .fold(f64::NEG_INFINITY, f64::max);

    // trapezoid partials of ∫G and the last-half increment
    let mut total = 0.0;
    let mut at_half = 0.0;
    let t_half = ts[0] + 0.5 * (ts[ts.len() - 1] - ts[0]);
    for i in 0..ts.len() - 1 {
        total += 0.5 * h * (g[i] + g[i + 1]);
        if ts[i + 1] <= t_half {
            at_half = total;
        }
    }
    let increment = total - at_half;
    let cauchy_ok = increment.abs() <= opts.cauchy_ratio * total.abs() + 1e-12;

    let span = ts[ts.len() - 1] - ts[0];
    let t_tail = ts[ts.len() - 1] - opts.tail_fraction * span;
    let window: Vec<f64> = ts
        .iter()
        .zip(f)
        .filter(|(t, _)| **t >= t_tail)
        .map(|(_, v)| *v)
        .collect();
    let tail_oscillation = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - window.iter().cloned().fold(f64::INFINITY, f64::min);
    let oscillation_ok = tail_oscillation <= opts.oscillation_tol;

    let verdict = if max_violation > tolerance {
        LimitVerdict::Violated
    } else if cauchy_ok && oscillation_ok {
        LimitVerdict::LimitPlausible
    } else {
        LimitVerdict::Inconclusive
    };

    Ok(FejerReport {
        verdict,
        max_inequality_violation: max_violation,
        inequality_tolerance: tolerance,
        integral_total: total,
        integral_last_half_increment: increment,
        cauchy_ok,
        tail_oscillation,
        oscillation_ok,
    })
}
