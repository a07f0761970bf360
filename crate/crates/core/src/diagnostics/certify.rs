//! Certification that a point solves the constrained problem.
//!
//! A candidate z is accepted as an element of S = argmin{φ over argmin ψ}
//! when (a) it lies in the zero set within the membership tolerance and
//! (b) the variational inequality ⟨∇φ(z), y − z⟩ ≥ −tol holds over a seeded
//! sample of feasible probes y (first-order optimality over a convex set).
//! The report keeps the worst probe so a failed certificate names the
//! direction that broke it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex::{ConvexFunction, ConvexSet};
use crate::error::{CoreError, Result};
use crate::vecmath::{dist, dot, sub};

pub const OPTIMALITY_TOL: f64 = 1e-8;
pub const CERTIFY_SAMPLES: usize = 1000;
const CERTIFY_SEED: u64 = 0x5eed_cafe;

#[derive(Clone, Debug, serde::Serialize)]
pub struct CertificateReport {
    pub membership_distance: f64,
    /// max over probes of ⟨∇φ(z), z − y⟩ (positive = violation).
    pub max_violation: f64,
    /// Probe achieving the max violation.
    pub worst_probe: Option<Vec<f64>>,
    pub probes: usize,
    pub pass: bool,
}

/// Check z ∈ S by membership plus the sampled variational inequality.
pub fn certify_solution(
    phi: &ConvexFunction,
    zero_set: &ConvexSet,
    z: &[f64],
) -> Result<CertificateReport> {
    let proj = zero_set.project(z)?;
    let membership_distance = dist(z, &proj);
    let grad = phi.grad(z)?;
    let mut rng = ChaCha8Rng::seed_from_u64(CERTIFY_SEED);
    let n = z.len();

    let mut max_violation = f64::NEG_INFINITY;
    let mut worst: Option<Vec<f64>> = None;
    for i in 0..CERTIFY_SAMPLES {
        // probes at several scales so both local and far feasible
        // directions get exercised
        let scale = [0.1, 1.0, 10.0][i % 3];
        let probe: Vec<f64> = (0..n)
            .map(|j| z[j] + scale * rng.random_range(-1.0..1.0))
            .collect();
        let y = zero_set.project(&probe)?;
        let violation = -dot(&grad, &sub(&y, z));
        if violation > max_violation {
            max_violation = violation;
            worst = Some(y);
        }
    }

    let pass = membership_distance <= crate::convex::MEMBERSHIP_TOL
        && max_violation <= OPTIMALITY_TOL;
    Ok(CertificateReport {
        membership_distance,
        max_violation,
        worst_probe: worst,
        probes: CERTIFY_SAMPLES,
        pass,
    })
}

/// `certify_solution` that promotes failure to a hard error naming the
/// broken certificate, as the inequality checks require.
pub fn require_certified(
    phi: &ConvexFunction,
    zero_set: &ConvexSet,
    z: &[f64],
) -> Result<CertificateReport> {
    let report = certify_solution(phi, zero_set, z)?;
    if report.membership_distance > crate::convex::MEMBERSHIP_TOL {
        return Err(CoreError::CertificationFailed {
            certificate: "zero-set membership".into(),
            detail: format!(
                "dist(z, argmin psi) = {:.3e} exceeds {:.0e}",
                report.membership_distance,
                crate::convex::MEMBERSHIP_TOL
            ),
        });
    }
    if report.max_violation > OPTIMALITY_TOL {
        return Err(CoreError::CertificationFailed {
            certificate: "first-order optimality".into(),
            detail: format!(
                "variational inequality violated by {:.3e} at probe {:?}",
                report.max_violation,
                report.worst_probe.as_deref().unwrap_or(&[])
            ),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::ConvexSet;

    #[test]
    fn projected_center_is_certified() {
        let phi = ConvexFunction::shifted_squared_norm(vec![2.0, 1.0]);
        let line = ConvexSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let r = require_certified(&phi, &line, &[2.0, 0.0]).unwrap();
        assert!(r.pass);
        assert!(r.max_violation <= 1e-10);
    }

    #[test]
    fn non_optimal_feasible_point_fails_with_probe() {
        let phi = ConvexFunction::shifted_squared_norm(vec![2.0, 1.0]);
        let line = ConvexSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        // (0,0) is on the line but not optimal
        match require_certified(&phi, &line, &[0.0, 0.0]) {
            Err(CoreError::CertificationFailed { certificate, detail }) => {
                assert_eq!(certificate, "first-order optimality");
                assert!(detail.contains("probe"));
            }
            other => panic!("expected optimality failure, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_point_fails_membership() {
        let phi = ConvexFunction::shifted_squared_norm(vec![2.0, 1.0]);
        let line = ConvexSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        match require_certified(&phi, &line, &[2.0, 1.0]) {
            Err(CoreError::CertificationFailed { certificate, .. }) => {
                assert_eq!(certificate, "zero-set membership");
            }
            other => panic!("expected membership failure, got {other:?}"),
        }
    }

    #[test]
    fn interior_optimum_passes_with_zero_gradient() {
        // inactive halfspace: unconstrained minimizer inside the set
        let phi = ConvexFunction::shifted_squared_norm(vec![0.0, 0.0]);
        let hs = ConvexSet::halfspace(vec![1.0, 1.0], 1.0).unwrap();
        let r = require_certified(&phi, &hs, &[0.0, 0.0]).unwrap();
        assert!(r.pass);
        assert!(r.max_violation.abs() <= 1e-12);
    }
}
