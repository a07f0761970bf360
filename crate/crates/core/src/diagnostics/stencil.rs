//! Central-difference stencils on uniform grids, with error bounds.
//!
//! Diagnostic scalars (h_z, E) are only available as sampled series, so their
//! time derivatives come from O(h²) central differences. The inequality
//! checks need an honest bound for that discretization error; the third and
//! fourth derivatives entering the classical error terms are themselves
//! estimated from the data with wider stencils, and a data-noise floor
//! (default 1e-9 relative, matching the integrator tolerances) covers the
//! amplification of sampling error by the division by h and h².

use crate::error::{CoreError, Result};

/// Assumed relative accuracy of sampled trajectory data.
pub const DATA_NOISE: f64 = 1e-9;

pub fn check_uniform_grid(ts: &[f64]) -> Result<f64> {
    if ts.len() < 3 {
        return Err(CoreError::InvalidDiagnosticInput(
            "need at least 3 samples for central differences".into(),
        ));
    }
    let h = ts[1] - ts[0];
    if !(h > 0.0) {
        return Err(CoreError::InvalidDiagnosticInput(
            "sample times must be strictly increasing".into(),
        ));
    }
    for w in ts.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
            return Err(CoreError::InvalidDiagnosticInput(
                "diagnostics require a uniform output grid".into(),
            ));
        }
    }
    Ok(h)
}

/// First derivative at interior points: (f[i+1] − f[i−1]) / 2h.
pub fn d1(f: &[f64], h: f64) -> Vec<f64> {
    (1..f.len() - 1)
        .map(|i| (f[i + 1] - f[i - 1]) / (2.0 * h))
        .collect()
}

/// Second derivative at interior points: (f[i+1] − 2f[i] + f[i−1]) / h².
pub fn d2(f: &[f64], h: f64) -> Vec<f64> {
    (1..f.len() - 1)
        .map(|i| (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h))
        .collect()
}

fn max_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Wide-stencil estimate of max |f'''| over the grid.
fn third_derivative_estimate(f: &[f64], h: f64) -> f64 {
    if f.len() < 5 {
        return 0.0;
    }
    (2..f.len() - 2)
        .map(|i| (f[i + 2] - 2.0 * f[i + 1] + 2.0 * f[i - 1] - f[i - 2]).abs() / (2.0 * h * h * h))
        .fold(0.0, f64::max)
}

/// Wide-stencil estimate of max |f''''| over the grid.
fn fourth_derivative_estimate(f: &[f64], h: f64) -> f64 {
    if f.len() < 5 {
        return 0.0;
    }
    (2..f.len() - 2)
        .map(|i| {
            (f[i + 2] - 4.0 * f[i + 1] + 6.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]).abs()
                / (h * h * h * h)
        })
        .fold(0.0, f64::max)
}

/// Error bound for the O(h²) central first difference of `f`:
/// h²·max|f'''|/6 plus the noise floor ε·max|f|/h.
pub fn d1_error_bound(f: &[f64], h: f64) -> f64 {
    h * h * third_derivative_estimate(f, h) / 6.0 + DATA_NOISE * max_abs(f) / h
}

/// Error bound for the O(h²) central second difference of `f`:
/// h²·max|f''''|/12 plus the noise floor 4ε·max|f|/h².
pub fn d2_error_bound(f: &[f64], h: f64) -> f64 {
    h * h * fourth_derivative_estimate(f, h) / 12.0 + 4.0 * DATA_NOISE * max_abs(f) / (h * h)
}
