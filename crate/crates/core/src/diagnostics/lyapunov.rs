//! Pointwise verification of the two workhorse inequalities of the
//! convergence analysis along a sampled trajectory.
//!
//! With h_z(t) = ½‖x(t) − z‖² and E the energy, the analysis rests on
//!
//!   (composite)      ḧ_z + γḣ_z + (1/γ)Ė + φ(x) − φ(z) + β̃ψ(x) ≤ 0,
//!   (energy descent) Ė + γ‖ẋ‖² ≤ kβ(t)ψ(x),
//!
//! where β̃ = (1 − k/γ)β. Both are exact statements for exact solutions;
//! sampled trajectories satisfy them up to the central-difference error, so
//! the pass threshold is 10× the discretization bound estimated from the
//! data itself.

use crate::dynamics::{ProblemInstance, Trajectory};
use crate::error::{CoreError, Result};
use crate::schedule::beta_tilde;
use crate::vecmath::{norm_sq, sub};

use super::certify::{require_certified, CertificateReport};
use super::stencil;

#[derive(Clone, Debug, serde::Serialize)]
pub struct InequalityScan {
    /// max over interior samples of the inequality's left-hand side
    /// (≤ 0 ideally; positive values are violations).
    pub max_lhs: f64,
    pub at_t: f64,
    /// 10× the estimated discretization error bound.
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct LyapunovReport {
    pub z: Vec<f64>,
    pub k: f64,
    pub certificate: CertificateReport,
    /// ḧ_z + γḣ_z + (1/γ)Ė + φ(x) − φ(z) + β̃ψ ≤ 0.
    pub composite: InequalityScan,
    /// Ė + γ‖ẋ‖² − kβψ ≤ 0.
    pub energy_descent: InequalityScan,
}

/// Scan both inequalities along the trajectory for a certified z ∈ S and
/// growth constant k (0 ≤ k < γ). Certification failure is a hard error
/// naming the broken certificate.
pub fn lyapunov_inequality_check(
    traj: &Trajectory,
    p: &ProblemInstance,
    z: &[f64],
    k: f64,
) -> Result<LyapunovReport> {
    if z.len() != p.dimension() {
        return Err(CoreError::DimensionMismatch {
            expected: p.dimension(),
            got: z.len(),
        });
    }
    if !(k >= 0.0) || k >= p.gamma {
        return Err(CoreError::GrowthConstantOutOfRange { k, gamma: p.gamma });
    }
    let certificate = require_certified(&p.phi, p.psi.zero_set(), z)?;

    let ts: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    let h = stencil::check_uniform_grid(&ts)?;
    let phi_z = p.phi.eval(z)?;

    let h_z: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| 0.5 * norm_sq(&sub(&s.x, z)))
        .collect();
    let energy: Vec<f64> = traj.samples.iter().map(|s| s.energy()).collect();

    let dh = stencil::d1(&h_z, h);
    let ddh = stencil::d2(&h_z, h);
    let de = stencil::d1(&energy, h);

    let gamma = p.gamma;
    let tol_composite = 10.0
        * (stencil::d2_error_bound(&h_z, h)
            + gamma * stencil::d1_error_bound(&h_z, h)
            + stencil::d1_error_bound(&energy, h) / gamma);
    let tol_energy = 10.0 * stencil::d1_error_bound(&energy, h);

    let mut composite = InequalityScan {
        max_lhs: f64::NEG_INFINITY,
        at_t: 0.0,
        tolerance: tol_composite,
        pass: false,
    };
    let mut energy_descent = InequalityScan {
        max_lhs: f64::NEG_INFINITY,
        at_t: 0.0,
        tolerance: tol_energy,
        pass: false,
    };

    for j in 0..dh.len() {
        let s = &traj.samples[j + 1];
        let btilde = beta_tilde(&p.schedule, k, gamma, s.t)?;
        let lhs_c = ddh[j] + gamma * dh[j] + de[j] / gamma + (s.phi - phi_z) + btilde * s.psi;
        if lhs_c > composite.max_lhs {
            composite.max_lhs = lhs_c;
            composite.at_t = s.t;
        }
        let lhs_e = de[j] + gamma * norm_sq(&s.v) - k * s.beta * s.psi;
        if lhs_e > energy_descent.max_lhs {
            energy_descent.max_lhs = lhs_e;
            energy_descent.at_t = s.t;
        }
    }
    composite.pass = composite.max_lhs <= composite.tolerance;
    energy_descent.pass = energy_descent.max_lhs <= energy_descent.tolerance;

    Ok(LyapunovReport {
        z: z.to_vec(),
        k,
        certificate,
        composite,
        energy_descent,
    })
}
