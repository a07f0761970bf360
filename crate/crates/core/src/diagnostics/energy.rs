//! Energy along a trajectory and the dissipation identity.
//!
//! E(t) = ½‖ẋ‖² + φ(x) + β(t)ψ(x); along solutions of the second-order
//! system its derivative is −γ‖ẋ‖² + β̇(t)ψ(x). The residual between the
//! sampled dE/dt and that model is an O(h²) quantity on smooth runs, so it
//! doubles as a regression check on both the integrator and the schedule
//! derivative.

use crate::dynamics::{ProblemInstance, Trajectory};
use crate::error::Result;
use crate::vecmath::norm_sq;

use super::stencil;

#[derive(Clone, Debug, serde::Serialize)]
pub struct EnergySample {
    pub t: f64,
    pub energy: f64,
    pub phi: f64,
    pub psi: f64,
    pub beta: f64,
    pub kinetic: f64,
}

/// Per-sample energies. E = kinetic + φ + βψ holds by construction.
pub fn energy_series(traj: &Trajectory) -> Vec<EnergySample> {
    traj.samples
        .iter()
        .map(|s| {
            let kinetic = 0.5 * norm_sq(&s.v);
            EnergySample {
                t: s.t,
                energy: kinetic + s.phi + s.beta * s.psi,
                phi: s.phi,
                psi: s.psi,
                beta: s.beta,
                kinetic,
            }
        })
        .collect()
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct DissipationReport {
    /// Output-grid spacing the residuals were computed on.
    pub grid_step: f64,
    /// Interior sample times.
    pub times: Vec<f64>,
    /// |central dE/dt − (−γ‖ẋ‖² + β̇ψ)| per interior sample.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Residuals of the dissipation identity dE/dt = −γ‖ẋ‖² + β̇(t)ψ(x).
pub fn dissipation_residual(traj: &Trajectory, p: &ProblemInstance) -> Result<DissipationReport> {
    let ts: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    let h = stencil::check_uniform_grid(&ts)?;
    let energy: Vec<f64> = traj.samples.iter().map(|s| s.energy()).collect();
    let de = stencil::d1(&energy, h);

    let mut times = Vec::with_capacity(de.len());
    let mut residuals = Vec::with_capacity(de.len());
    let mut max_residual = 0.0f64;
    for (j, dedt) in de.iter().enumerate() {
        let s = &traj.samples[j + 1];
        let model = -p.gamma * norm_sq(&s.v) + p.schedule.beta_dot(s.t) * s.psi;
        let r = (dedt - model).abs();
        max_residual = max_residual.max(r);
        times.push(s.t);
        residuals.push(r);
    }
    Ok(DissipationReport {
        grid_step: h,
        times,
        residuals,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{ConvexFunction, ConvexSet, PenaltyFunction};
    use crate::dynamics::{integrate, IntegratorConfig, SystemKind};
    use crate::schedule::PenaltySchedule;

    fn equilibrium_problem() -> ProblemInstance {
        let line = ConvexSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        ProblemInstance::new(
            ConvexFunction::shifted_squared_norm(vec![2.0, 0.0]),
            PenaltyFunction::squared_distance(line),
            3.0,
            PenaltySchedule::power(2.0).unwrap(),
            vec![2.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap()
    }

    fn heavy_ball() -> ProblemInstance {
        ProblemInstance::new(
            ConvexFunction::shifted_squared_norm(vec![0.0, 0.0]),
            PenaltyFunction::zero(2),
            1.0,
            PenaltySchedule::constant(1.0).unwrap(),
            vec![1.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_energy_is_constant_phi() {
        let p = equilibrium_problem();
        let cfg = IntegratorConfig::adaptive(5.0).with_samples(101);
        let traj = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
        for e in energy_series(&traj) {
            assert!((e.energy - 0.0).abs() <= 1e-12); // φ(z*) = 0 here
            assert_eq!(e.kinetic, 0.0);
        }
    }

    #[test]
    fn energy_sample_arithmetic() {
        // (v=(0,2), φ=1, ψ=0.5, β=4) → E = 2 + 1 + 2 = 5
        let kinetic = 0.5 * norm_sq(&[0.0, 2.0]);
        let e = kinetic + 1.0 + 4.0 * 0.5;
        assert_eq!(e, 5.0);
    }

    #[test]
    fn equilibrium_residuals_vanish() {
        let p = equilibrium_problem();
        let cfg = IntegratorConfig::adaptive(5.0).with_samples(201);
        let traj = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
        let rep = dissipation_residual(&traj, &p).unwrap();
        assert!(rep.max_residual <= 1e-12, "max {}", rep.max_residual);
    }

    #[test]
    fn heavy_ball_residual_scales_quadratically() {
        let p = heavy_ball();
        let run = |samples: usize| {
            let cfg = IntegratorConfig::adaptive(20.0).with_samples(samples);
            let traj = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
            dissipation_residual(&traj, &p).unwrap().max_residual
        };
        // output steps h = 0.01 and h = 0.005
        let coarse = run(2001);
        let fine = run(4001);
        assert!(coarse <= 1e-3, "coarse residual {coarse}");
        assert!(
            coarse / fine >= 3.0,
            "expected O(h²) scaling, got {coarse:.3e} -> {fine:.3e}"
        );
    }

    #[test]
    fn corrupted_energy_column_is_detected() {
        let p = heavy_ball();
        let cfg = IntegratorConfig::adaptive(20.0).with_samples(2001);
        let mut traj = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
        // negative control: damage the velocity halfway so E picks up a bump
        let mid = traj.samples.len() / 2;
        traj.samples[mid].v[0] += 0.5;
        let rep = dissipation_residual(&traj, &p).unwrap();
        assert!(rep.max_residual > 1e-1, "max {}", rep.max_residual);
    }
}
