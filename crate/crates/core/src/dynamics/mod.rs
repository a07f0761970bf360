//! The penalty dynamical systems and their trajectories.
//!
//! Second order: ẍ + γẋ + ∇φ(x) + β(t)∇ψ(x) = 0 with x(0) = u₀, ẋ(0) = v₀.
//! First order (baseline): ẋ = −∇φ(x) − β(t)∇ψ(x).
//! Heavy ball is the second-order system with ψ = 0.

mod integrator;

pub use integrator::{Abort, RunStats};

use crate::convex::{ConvexFunction, PenaltyFunction};
use crate::error::{CoreError, Result};
use crate::schedule::{verify_growth, GrowthReport, PenaltySchedule};
use crate::vecmath::{all_finite, norm_sq};
use integrator::GridSampler;

/// A fully specified constrained-minimization run: minimize φ over the zero
/// set of ψ, integrated with damping γ and penalty schedule β.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub phi: ConvexFunction,
    pub psi: PenaltyFunction,
    pub gamma: f64,
    pub schedule: PenaltySchedule,
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
    /// Certified optimal solution when the factory knows one.
    pub analytic_solution: Option<Vec<f64>>,
}

impl ProblemInstance {
    pub fn new(
        phi: ConvexFunction,
        psi: PenaltyFunction,
        gamma: f64,
        schedule: PenaltySchedule,
        u0: Vec<f64>,
        v0: Vec<f64>,
    ) -> Result<Self> {
        let n = phi.dimension();
        for (what, len) in [("psi", psi.dimension()), ("u0", u0.len()), ("v0", v0.len())] {
            if len != n {
                return Err(CoreError::InvalidConstruction(format!(
                    "{what} has dimension {len}, expected {n}"
                )));
            }
        }
        if !(gamma > 0.0) {
            return Err(CoreError::InvalidConstruction(format!(
                "damping gamma must be positive, got {gamma}"
            )));
        }
        // energy diagnostics need inf φ; reject unbounded objectives up front
        if phi.lower_bound().is_none() {
            return Err(CoreError::InvalidConstruction(format!(
                "objective '{}' has no known lower bound; energy diagnostics require one",
                phi.name()
            )));
        }
        // the zero set must be nonempty; witness doubles as a sanity probe
        let witness = psi.zero_set().witness_point();
        if psi.eval(&witness)?.abs() > 1e-12 {
            return Err(CoreError::InvalidConstruction(
                "penalty does not vanish at its zero-set witness".into(),
            ));
        }
        Ok(ProblemInstance {
            phi,
            psi,
            gamma,
            schedule,
            u0,
            v0,
            analytic_solution: None,
        })
    }

    pub fn with_solution(mut self, z: Vec<f64>) -> Self {
        self.analytic_solution = Some(z);
        self
    }

    pub fn dimension(&self) -> usize {
        self.phi.dimension()
    }
}

/// Instantaneous state of the second-order system.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

/// (ẋ, v̇) = (v, −γv − ∇φ(x) − β(t)∇ψ(x)).
pub fn rhs_second_order(p: &ProblemInstance, s: &State) -> Result<(Vec<f64>, Vec<f64>)> {
    let grad_phi = p.phi.grad(&s.x)?;
    let grad_psi = p.psi.grad(&s.x)?;
    let beta = p.schedule.beta(s.t);
    let accel: Vec<f64> = (0..s.x.len())
        .map(|i| -p.gamma * s.v[i] - grad_phi[i] - beta * grad_psi[i])
        .collect();
    if !all_finite(&accel) {
        return Err(CoreError::IntegrationAborted {
            t: s.t,
            reason: "non-finite gradient in second-order right-hand side".into(),
        });
    }
    Ok((s.v.clone(), accel))
}

/// ẋ = −∇φ(x) − β(t)∇ψ(x).
pub fn rhs_first_order(p: &ProblemInstance, t: f64, x: &[f64]) -> Result<Vec<f64>> {
    let grad_phi = p.phi.grad(x)?;
    let grad_psi = p.psi.grad(x)?;
    let beta = p.schedule.beta(t);
    let dx: Vec<f64> = (0..x.len())
        .map(|i| -grad_phi[i] - beta * grad_psi[i])
        .collect();
    if !all_finite(&dx) {
        return Err(CoreError::IntegrationAborted {
            t,
            reason: "non-finite gradient in first-order right-hand side".into(),
        });
    }
    Ok(dx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    SecondOrder,
    FirstOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Method {
    /// Adaptive embedded Dormand-Prince 4(5), the default.
    Dopri45,
    /// Classical RK4 with a fixed step (order studies, cross-checks).
    Rk4Fixed { step: f64 },
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: f64,
    pub t_end: f64,
    pub sample_count: usize,
    /// Integrate even when the growth verifier rejects the schedule; the
    /// override is recorded in the trajectory metadata.
    pub allow_infeasible_growth: bool,
}

impl IntegratorConfig {
    pub fn adaptive(t_end: f64) -> Self {
        IntegratorConfig {
            method: Method::Dopri45,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: t_end / 10.0,
            initial_step: 1e-2,
            t_end,
            sample_count: 1001,
            allow_infeasible_growth: false,
        }
    }

    pub fn with_samples(mut self, count: usize) -> Self {
        self.sample_count = count;
        self
    }

    pub fn with_tolerances(mut self, rel: f64, abs: f64) -> Self {
        self.rel_tol = rel;
        self.abs_tol = abs;
        self
    }

    fn validate(&self) -> Result<()> {
        let tol_ok = |v: f64| v > 0.0 && v < 1.0;
        if !tol_ok(self.rel_tol) || !tol_ok(self.abs_tol) {
            return Err(CoreError::InvalidConstruction(format!(
                "tolerances must lie in (0,1): rel={}, abs={}",
                self.rel_tol, self.abs_tol
            )));
        }
        if !(self.t_end > 0.0) {
            return Err(CoreError::InvalidConstruction(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if !(self.max_step > 0.0) || !(self.initial_step > 0.0) {
            return Err(CoreError::InvalidConstruction(
                "max_step and initial_step must be positive".into(),
            ));
        }
        if self.sample_count < 2 {
            return Err(CoreError::InvalidConstruction(
                "sample_count must be at least 2".into(),
            ));
        }
        if let Method::Rk4Fixed { step } = self.method {
            if !(step > 0.0) {
                return Err(CoreError::InvalidConstruction(
                    "fixed step must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One output-grid row with the derived quantities every diagnostic needs.
#[derive(Clone, Debug)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub phi: f64,
    pub psi: f64,
    pub beta: f64,
    pub grad_phi: Vec<f64>,
    pub grad_psi: Vec<f64>,
}

impl Sample {
    /// E(t) = ½‖ẋ‖² + φ(x) + β(t)ψ(x).
    pub fn energy(&self) -> f64 {
        0.5 * norm_sq(&self.v) + self.phi + self.beta * self.psi
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct IntegrationStats {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evaluations: usize,
    pub max_error_estimate: f64,
    pub growth_override: bool,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub system: SystemKind,
    pub samples: Vec<Sample>,
    pub stats: IntegrationStats,
}

impl Trajectory {
    pub fn dimension(&self) -> usize {
        self.samples.first().map_or(0, |s| s.x.len())
    }

    pub fn terminal(&self) -> &Sample {
        self.samples.last().expect("trajectory is never empty")
    }

    /// Uniform spacing of the output grid.
    pub fn grid_step(&self) -> f64 {
        if self.samples.len() < 2 {
            return 0.0;
        }
        self.samples[1].t - self.samples[0].t
    }

    /// CSV export: header t, x_0..x_{n-1}, v_0..v_{n-1}, phi, psi, beta, E.
    /// Plain `{}` formatting keeps every f64 bit-exact on round trip.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.dimension();
        let mut header = String::from("t");
        for i in 0..n {
            header.push_str(&format!(",x_{i}"));
        }
        for i in 0..n {
            header.push_str(&format!(",v_{i}"));
        }
        header.push_str(",phi,psi,beta,E");
        writeln!(w, "{header}")?;
        for s in &self.samples {
            let mut row = format!("{}", s.t);
            for xi in &s.x {
                row.push_str(&format!(",{xi}"));
            }
            for vi in &s.v {
                row.push_str(&format!(",{vi}"));
            }
            row.push_str(&format!(",{},{},{},{}", s.phi, s.psi, s.beta, s.energy()));
            writeln!(w, "{row}")?;
        }
        Ok(())
    }
}

/// Integration failures that carry context (and the partial trajectory when
/// the run got anywhere).
#[derive(Debug, thiserror::Error)]
pub enum IntegrateError {
    #[error("growth condition infeasible: k_min={} >= gamma={} (set allow_infeasible_growth to override)", .0.k_min, .0.gamma)]
    GrowthInfeasible(GrowthReport),
    #[error("integration aborted: {reason}")]
    Aborted {
        reason: Abort,
        partial: Box<Trajectory>,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Integrate the chosen system over [0, cfg.t_end].
///
/// The growth condition (β̇ ≥ 0, β̇ ≤ kβ with k < γ) is verified first and
/// rejects the run unless explicitly overridden.
pub fn integrate(
    p: &ProblemInstance,
    cfg: &IntegratorConfig,
    system: SystemKind,
) -> std::result::Result<Trajectory, IntegrateError> {
    cfg.validate()?;
    let growth = verify_growth(&p.schedule, p.gamma, 0.0, &[cfg.t_end])?;
    let growth_override = if growth.feasible {
        false
    } else if cfg.allow_infeasible_growth {
        true
    } else {
        return Err(IntegrateError::GrowthInfeasible(growth));
    };

    let n = p.dimension();
    let h0 = initial_step_heuristic(p, cfg.initial_step);
    let mut sampler = GridSampler::uniform(cfg.t_end, cfg.sample_count);

    let run_stats = match system {
        SystemKind::SecondOrder => {
            let mut y0 = p.u0.clone();
            y0.extend_from_slice(&p.v0);
            let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
                let (x, v) = y.split_at(n);
                let grad_phi = p.phi.grad(x)?;
                let grad_psi = p.psi.grad(x)?;
                let beta = p.schedule.beta(t);
                for i in 0..n {
                    dy[i] = v[i];
                    dy[n + i] = -p.gamma * v[i] - grad_phi[i] - beta * grad_psi[i];
                }
                Ok(())
            };
            run_method(cfg, h0, rhs, &y0, &mut sampler)?
        }
        SystemKind::FirstOrder => {
            let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
                let grad_phi = p.phi.grad(y)?;
                let grad_psi = p.psi.grad(y)?;
                let beta = p.schedule.beta(t);
                for i in 0..n {
                    dy[i] = -grad_phi[i] - beta * grad_psi[i];
                }
                Ok(())
            };
            run_method(cfg, h0, rhs, &p.u0, &mut sampler)?
        }
    };

    let stats = IntegrationStats {
        steps_accepted: run_stats.steps_accepted,
        steps_rejected: run_stats.steps_rejected,
        rhs_evaluations: run_stats.rhs_evaluations,
        max_error_estimate: run_stats.max_error_estimate,
        growth_override,
    };

    let mut samples = Vec::with_capacity(sampler.points.len());
    for (t, y) in &sampler.points {
        let (x, v): (Vec<f64>, Vec<f64>) = match system {
            SystemKind::SecondOrder => (y[..n].to_vec(), y[n..].to_vec()),
            SystemKind::FirstOrder => {
                let v = rhs_first_order(p, *t, y)?;
                (y.clone(), v)
            }
        };
        samples.push(Sample {
            t: *t,
            phi: p.phi.eval(&x)?,
            psi: p.psi.eval(&x)?,
            beta: p.schedule.beta(*t),
            grad_phi: p.phi.grad(&x)?,
            grad_psi: p.psi.grad(&x)?,
            x,
            v,
        });
    }

    let traj = Trajectory {
        system,
        samples,
        stats,
    };

    if let Some(reason) = run_stats.abort {
        return Err(IntegrateError::Aborted {
            reason,
            partial: Box::new(traj),
        });
    }
    Ok(traj)
}

fn run_method<F>(
    cfg: &IntegratorConfig,
    h0: f64,
    rhs: F,
    y0: &[f64],
    sampler: &mut GridSampler,
) -> Result<RunStats>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    match cfg.method {
        Method::Dopri45 => integrator::dopri45(
            rhs,
            y0,
            cfg.t_end,
            cfg.rel_tol,
            cfg.abs_tol,
            h0,
            cfg.max_step,
            sampler,
        ),
        Method::Rk4Fixed { step } => integrator::rk4_fixed(rhs, y0, cfg.t_end, step, sampler),
    }
}

/// The documented initial-step heuristic: tie h₀ to the gradient Lipschitz
/// scale of the right-hand side at t = 0.
pub fn initial_step_heuristic(p: &ProblemInstance, requested: f64) -> f64 {
    let scale = 1.0 + p.phi.grad_lipschitz() + p.schedule.beta(0.0) * p.psi.grad_lipschitz();
    requested.min(0.01 / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::ConvexSet;
    use crate::vecmath::{dist, norm};

    fn flagship() -> ProblemInstance {
        let line = ConvexSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        ProblemInstance::new(
            ConvexFunction::shifted_squared_norm(vec![2.0, 1.0]),
            PenaltyFunction::squared_distance(line),
            3.0,
            PenaltySchedule::power(2.0).unwrap(),
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap()
        .with_solution(vec![2.0, 0.0])
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
    fn rhs_second_order_hand_values() {
        // autonomous quadratic: (ẋ, v̇) = (v, −γv − x)
        let hb = heavy_ball();
        let s = State {
            t: 0.0,
            x: vec![1.0, 0.0],
            v: vec![0.0, 0.0],
        };
        let (dx, dv) = rhs_second_order(&hb, &s).unwrap();
        assert_eq!(dx, vec![0.0, 0.0]);
        assert_eq!(dv, vec![-1.0, 0.0]);

        // flagship at t=1, x=(0,2), v=(1,1):
        // v̇ = −3(1,1) − (−2,1) − 4(0,2) = (−1, −12)
        let fs = flagship();
        let s = State {
            t: 1.0,
            x: vec![0.0, 2.0],
            v: vec![1.0, 1.0],
        };
        let (dx, dv) = rhs_second_order(&fs, &s).unwrap();
        assert_eq!(dx, vec![1.0, 1.0]);
        assert!((dv[0] - -1.0).abs() < 1e-14 && (dv[1] - -12.0).abs() < 1e-14);
    }

    #[test]
    fn rhs_equilibrium_is_stationary() {
        // interior optimum: ∇φ(z)=0 and ψ(z)=0 at z=(2,0)
        let line = ConvexSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let p = ProblemInstance::new(
            ConvexFunction::shifted_squared_norm(vec![2.0, 0.0]),
            PenaltyFunction::squared_distance(line),
            3.0,
            PenaltySchedule::power(2.0).unwrap(),
            vec![2.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let s = State {
            t: 5.0,
            x: vec![2.0, 0.0],
            v: vec![0.0, 0.0],
        };
        let (dx, dv) = rhs_second_order(&p, &s).unwrap();
        assert_eq!(dx, vec![0.0, 0.0]);
        assert_eq!(dv, vec![0.0, 0.0]);
    }

    #[test]
    fn rhs_first_order_hand_values() {
        let hb = heavy_ball();
        assert_eq!(
            rhs_first_order(&hb, 0.3, &[1.0, 0.0]).unwrap(),
            vec![-1.0, 0.0]
        );
        // flagship at t=1, x=(0,2): (2,−1) − (0,8) = (2,−9)
        let fs = flagship();
        let dx = rhs_first_order(&fs, 1.0, &[0.0, 2.0]).unwrap();
        assert!((dx[0] - 2.0).abs() < 1e-14 && (dx[1] - -9.0).abs() < 1e-14);
    }

    #[test]
    fn heavy_ball_matches_damped_oscillator_closed_form() {
        // ẍ + ẋ + x = 0, x(0)=1, ẋ(0)=0:
        // x(t) = e^{−t/2}(cos ωt + (1/2ω) sin ωt) with ω = √3/2
        let p = heavy_ball();
        let cfg = IntegratorConfig::adaptive(20.0).with_samples(2001);
        let traj = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
        let omega = 3.0f64.sqrt() / 2.0;
        for s in traj.samples.iter().step_by(100) {
            let expected = (-0.5 * s.t).exp()
                * ((omega * s.t).cos() + (0.5 / omega) * (omega * s.t).sin());
            assert!(
                (s.x[0] - expected).abs() < 1e-6,
                "t={}: got {}, closed form {}",
                s.t,
                s.x[0],
                expected
            );
            assert!(s.x[1].abs() < 1e-12);
        }
        // eigenvalue analysis: the envelope e^{−t/2} puts ‖x(20)‖ below 1e−3
        assert!(norm(&traj.terminal().x) <= 1e-3);
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let line = ConvexSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let p = ProblemInstance::new(
            ConvexFunction::shifted_squared_norm(vec![2.0, 0.0]),
            PenaltyFunction::squared_distance(line),
            3.0,
            PenaltySchedule::power(2.0).unwrap(),
            vec![2.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let cfg = IntegratorConfig::adaptive(10.0).with_samples(101);
        let traj = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
        for s in &traj.samples {
            assert!(dist(&s.x, &[2.0, 0.0]) <= cfg.abs_tol.max(1e-10), "t={}", s.t);
            assert!(norm(&s.v) <= cfg.abs_tol.max(1e-10));
        }
    }

    #[test]
    fn flagship_run_converges_to_projected_center() {
        let p = flagship();
        let cfg = IntegratorConfig::adaptive(100.0);
        let traj = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
        let end = traj.terminal();
        assert!(
            dist(&end.x, &[2.0, 0.0]) <= 5e-2,
            "terminal {:?}",
            end.x
        );
        assert!(traj.stats.steps_rejected < traj.stats.steps_accepted);
    }

    #[test]
    fn growth_infeasible_schedule_is_rejected_without_override() {
        let line = ConvexSet::hyperplane(vec![0.0, 1.0], 0.0).unwrap();
        let p = ProblemInstance::new(
            ConvexFunction::shifted_squared_norm(vec![2.0, 1.0]),
            PenaltyFunction::squared_distance(line),
            1.0,
            PenaltySchedule::power(4.0).unwrap(),
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let cfg = IntegratorConfig::adaptive(1.0);
        match integrate(&p, &cfg, SystemKind::SecondOrder) {
            Err(IntegrateError::GrowthInfeasible(r)) => {
                assert_eq!(r.k_min, 4.0);
            }
            other => panic!("expected growth rejection, got {other:?}"),
        }
        let mut cfg = cfg;
        cfg.allow_infeasible_growth = true;
        let traj = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
        assert!(traj.stats.growth_override);
    }

    #[test]
    fn first_and_second_order_share_the_limit() {
        let p = flagship();
        let cfg = IntegratorConfig::adaptive(40.0).with_samples(401);
        let second = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
        let first = integrate(&p, &cfg, SystemKind::FirstOrder).unwrap();
        assert!(dist(&second.terminal().x, &first.terminal().x) < 1e-2);
    }

    #[test]
    fn time_grid_invariance_under_tolerance_tightening() {
        let p = flagship();
        let loose = IntegratorConfig::adaptive(50.0).with_tolerances(1e-9, 1e-12);
        let tight = IntegratorConfig::adaptive(50.0).with_tolerances(1e-11, 1e-13);
        let a = integrate(&p, &loose, SystemKind::SecondOrder).unwrap();
        let b = integrate(&p, &tight, SystemKind::SecondOrder).unwrap();
        assert!(dist(&a.terminal().x, &b.terminal().x) <= 1e-6);
    }

    #[test]
    fn rk4_step_halving_gains_an_order() {
        let p = flagship();
        let reference = {
            let cfg = IntegratorConfig::adaptive(100.0)
                .with_tolerances(1e-12, 1e-14)
                .with_samples(11);
            integrate(&p, &cfg, SystemKind::SecondOrder).unwrap()
        };
        let terminal_err = |step: f64| {
            let mut cfg = IntegratorConfig::adaptive(100.0).with_samples(11);
            cfg.method = Method::Rk4Fixed { step };
            let traj = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
            let mut d = 0.0f64;
            for (a, b) in traj
                .terminal()
                .x
                .iter()
                .chain(traj.terminal().v.iter())
                .zip(reference.terminal().x.iter().chain(reference.terminal().v.iter()))
            {
                d = d.max((a - b).abs());
            }
            d
        };
        let coarse = terminal_err(0.01);
        let fine = terminal_err(0.005);
        assert!(
            coarse / fine >= 8.0,
            "step halving gained only {:.2}x (coarse {coarse:.3e}, fine {fine:.3e})",
            coarse / fine
        );
    }

    #[test]
    fn unstable_fixed_step_aborts_with_partial_trajectory() {
        // RK4 at step 1.0 sits far outside the stability region once beta
        // grows; the blow-up must surface as a non-finite abort that still
        // hands back the partial trajectory
        let p = flagship();
        let mut cfg = IntegratorConfig::adaptive(100.0).with_samples(101);
        cfg.method = Method::Rk4Fixed { step: 1.0 };
        match integrate(&p, &cfg, SystemKind::SecondOrder) {
            Err(IntegrateError::Aborted { reason, partial }) => {
                assert!(matches!(reason, Abort::NonFinite { .. }), "{reason:?}");
                assert!(!partial.samples.is_empty());
                assert!(partial.terminal().t < 100.0);
            }
            other => panic!("expected an abort, got {other:?}"),
        }
    }

    #[test]
    fn damping_dissipates_energy_in_the_autonomous_case() {
        let p = heavy_ball();
        let cfg = IntegratorConfig::adaptive(20.0).with_samples(2001);
        let traj = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
        let mut prev = traj.samples[0].energy();
        for s in &traj.samples[1..] {
            let e = s.energy();
            assert!(e <= prev + 1e-8, "energy rose at t={}", s.t);
            prev = e;
        }
    }

    #[test]
    fn trajectory_csv_round_trips_terminal_row() {
        let p = heavy_ball();
        let cfg = IntegratorConfig::adaptive(1.0).with_samples(11);
        let traj = integrate(&p, &cfg, SystemKind::SecondOrder).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x_0,x_1,v_0,v_1,phi,psi,beta,E");
        let last = lines.last().unwrap();
        let fields: Vec<f64> = last.split(',').map(|f| f.parse().unwrap()).collect();
        let end = traj.terminal();
        assert_eq!(fields[0], end.t);
        assert_eq!(fields[1], end.x[0]);
        assert_eq!(fields[3], end.v[0]);
        assert_eq!(fields[8], end.energy());
    }

    #[test]
    fn initial_step_heuristic_scales_with_stiffness() {
        let p = flagship();
        // L_φ = 1, β(0) = 1, L_ψ = 1: scale = 3
        assert!((initial_step_heuristic(&p, 1.0) - 0.01 / 3.0).abs() < 1e-15);
        assert_eq!(initial_step_heuristic(&p, 1e-4), 1e-4);
    }
}
