//! Benchmark problems with analytically known optima and certificates.
//!
//! Every factory output carries its optimum (a point, or a membership oracle
//! when the solution set is not a singleton), the optimal value, regime tags,
//! and a provenance note recording how the optimum was derived. `certify`
//! re-derives optimality from scratch through the sampled variational
//! inequality, so a corrupted optimum cannot survive construction unnoticed.

use crate::convex::{ConvexFunction, ConvexSet, PenaltyFunction};
use crate::diagnostics::{certify_solution, CertificateReport};
use crate::dynamics::ProblemInstance;
use crate::error::{CoreError, Result};
use crate::schedule::PenaltySchedule;
use crate::vecmath::{dist, dot, norm_sq, sub};

#[derive(Clone, Copy, Debug, Default, serde::Serialize)]
pub struct RegimeTags {
    pub strongly_convex: bool,
    pub divergent_beta: bool,
    pub heavy_ball: bool,
}

/// The optimum: a single certified point, or a set with a membership oracle
/// (for merely convex objectives whose solution set is not a singleton).
#[derive(Clone, Debug)]
pub enum Optimum {
    Point { z_star: Vec<f64> },
    Set { set: ConvexSet, representative: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct BenchmarkProblem {
    pub name: String,
    pub instance: ProblemInstance,
    pub optimum: Optimum,
    pub optimal_value: f64,
    pub regimes: RegimeTags,
    pub provenance: String,
}

impl BenchmarkProblem {
    /// A point of the solution set (the unique optimum when there is one).
    pub fn z_star(&self) -> &[f64] {
        match &self.optimum {
            Optimum::Point { z_star } => z_star,
            Optimum::Set { representative, .. } => representative,
        }
    }

    /// Distance to the solution set S.
    pub fn distance_to_solution_set(&self, x: &[f64]) -> Result<f64> {
        match &self.optimum {
            Optimum::Point { z_star } => Ok(dist(x, z_star)),
            Optimum::Set { set, .. } => Ok(dist(x, &set.project(x)?)),
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct BenchmarkCertificate {
    /// ψ(z*): must vanish.
    pub penalty_at_z: f64,
    pub variational: CertificateReport,
    /// max over feasible probes of φ(z*) − φ(y) (positive = some probe beats
    /// the claimed optimum).
    pub objective_excess: f64,
    /// |optimal_value − φ(z*)|.
    pub value_gap: f64,
    pub pass: bool,
}

/// Re-derive optimality of the stored optimum by the sampled variational
/// inequality, plus a direct objective comparison against feasible probes.
/// A violation above 1e-8 is a certification failure.
pub fn certify(bp: &BenchmarkProblem) -> Result<BenchmarkCertificate> {
    use rand::{Rng, SeedableRng};
    let z = bp.z_star();
    let penalty_at_z = bp.instance.psi.eval(z)?;
    let variational = certify_solution(&bp.instance.phi, bp.instance.psi.zero_set(), z)?;
    let value_gap = (bp.instance.phi.eval(z)? - bp.optimal_value).abs();

    // φ(y) ≥ φ(z*) − 1e-9 over sampled feasible y, checked directly rather
    // than through convexity of the variational inequality
    let phi_z = bp.instance.phi.eval(z)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0b5e_55ed);
    let mut objective_excess = f64::NEG_INFINITY;
    for i in 0..1000 {
        let scale = [0.1, 1.0, 10.0][i % 3];
        let probe: Vec<f64> = z
            .iter()
            .map(|zi| zi + scale * rng.random_range(-1.0..1.0))
            .collect();
        let y = bp.instance.psi.zero_set().project(&probe)?;
        objective_excess = objective_excess.max(phi_z - bp.instance.phi.eval(&y)?);
    }

    let pass = penalty_at_z <= 1e-12
        && variational.pass
        && objective_excess <= 1e-9
        && value_gap <= 1e-12;
    let report = BenchmarkCertificate {
        penalty_at_z,
        variational,
        objective_excess,
        value_gap,
        pass,
    };
    if !pass {
        return Err(CoreError::CertificationFailed {
            certificate: format!("benchmark '{}'", bp.name),
            detail: format!(
                "psi(z)={:.3e}, max VI violation={:.3e}, objective excess={:.3e}, value gap={:.3e}",
                report.penalty_at_z,
                report.variational.max_violation,
                report.objective_excess,
                report.value_gap
            ),
        });
    }
    Ok(report)
}

/// φ = ½‖·−a‖² over a constraint set: the optimum is the projection of a
/// (unique by 1-strong convexity; the projection argument needs nothing
/// beyond closedness and convexity of the set).
pub fn make_affine_constrained_quadratic(
    name: impl Into<String>,
    a: Vec<f64>,
    set: ConvexSet,
    gamma: f64,
    schedule: PenaltySchedule,
) -> Result<BenchmarkProblem> {
    let z_star = set.project(&a)?;
    let optimal_value = 0.5 * norm_sq(&sub(&z_star, &a));
    let divergent = schedule.is_divergent();
    let n = a.len();
    let instance = ProblemInstance::new(
        ConvexFunction::shifted_squared_norm(a),
        PenaltyFunction::squared_distance(set),
        gamma,
        schedule,
        vec![0.0; n],
        vec![0.0; n],
    )?
    .with_solution(z_star.clone());
    Ok(BenchmarkProblem {
        name: name.into(),
        instance,
        optimum: Optimum::Point { z_star },
        optimal_value,
        regimes: RegimeTags {
            strongly_convex: true,
            divergent_beta: divergent,
            heavy_ball: false,
        },
        provenance: "z* is the orthogonal projection of the objective center onto the \
                     constraint set"
            .into(),
    })
}

/// φ = ½‖·−a‖² over the halfspace ⟨u,x⟩ ≤ b; the optimum comes from the KKT
/// split between the active and inactive cases.
pub fn make_halfspace_problem(
    name: impl Into<String>,
    a: Vec<f64>,
    normal: Vec<f64>,
    offset: f64,
    gamma: f64,
    schedule: PenaltySchedule,
) -> Result<BenchmarkProblem> {
    let set = ConvexSet::halfspace(normal.clone(), offset)?;
    let excess = dot(&normal, &a) - offset;
    let z_star = if excess <= 0.0 {
        a.clone()
    } else {
        let mut z = a.clone();
        crate::vecmath::axpy(&mut z, -excess / norm_sq(&normal), &normal);
        z
    };
    let optimal_value = 0.5 * norm_sq(&sub(&z_star, &a));
    let divergent = schedule.is_divergent();
    let n = a.len();
    let instance = ProblemInstance::new(
        ConvexFunction::shifted_squared_norm(a),
        PenaltyFunction::squared_distance(set),
        gamma,
        schedule,
        vec![0.0; n],
        vec![0.0; n],
    )?
    .with_solution(z_star.clone());
    Ok(BenchmarkProblem {
        name: name.into(),
        instance,
        optimum: Optimum::Point { z_star },
        optimal_value,
        regimes: RegimeTags {
            strongly_convex: true,
            divergent_beta: divergent,
            heavy_ball: false,
        },
        provenance: "KKT for projection onto a halfspace: clip the center along the normal \
                     when the constraint is active"
            .into(),
    })
}

/// Merely convex objective φ(x) = ½(x₁−1)² (flat in x₂) over the unit ball.
/// φ only rewards x₁ = 1 and the ball meets that line in the single point
/// (1,0), so S = {(1,0)} without strong convexity of φ.
pub fn make_flat_objective_problem(
    name: impl Into<String>,
    gamma: f64,
    schedule: PenaltySchedule,
) -> Result<BenchmarkProblem> {
    // ½(x₁−1)² − ½ in quadratic-form terms; the constant does not matter
    let phi = ConvexFunction::quadratic(
        vec![vec![1.0, 0.0], vec![0.0, 0.0]],
        vec![1.0, 0.0],
    )?
    .with_known_lower_bound(-0.5);
    let ball = ConvexSet::ball(vec![0.0, 0.0], 1.0)?;
    let representative = vec![1.0, 0.0];
    let optimal_value = phi.eval(&representative)?;
    let divergent = schedule.is_divergent();
    let instance = ProblemInstance::new(
        phi,
        PenaltyFunction::squared_distance(ball),
        gamma,
        schedule,
        vec![0.0, 0.0],
        vec![0.0, 0.0],
    )?
    .with_solution(representative.clone());
    Ok(BenchmarkProblem {
        name: name.into(),
        instance,
        optimum: Optimum::Set {
            set: ConvexSet::singleton(representative.clone()),
            representative,
        },
        optimal_value,
        regimes: RegimeTags {
            strongly_convex: false,
            divergent_beta: divergent,
            heavy_ball: false,
        },
        provenance: "φ depends only on x₁ and the unit ball touches {x₁=1} at exactly (1,0); \
                     S is that single point, certified by the membership oracle"
            .into(),
    })
}

/// Heavy-ball regime: ψ = 0, so the dynamics reduce to damped gradient flow
/// of φ = ½‖·‖² and S is the origin.
pub fn make_heavy_ball_problem(
    name: impl Into<String>,
    gamma: f64,
    u0: Vec<f64>,
) -> Result<BenchmarkProblem> {
    let n = u0.len();
    let instance = ProblemInstance::new(
        ConvexFunction::shifted_squared_norm(vec![0.0; n]),
        PenaltyFunction::zero(n),
        gamma,
        PenaltySchedule::constant(1.0)?,
        u0,
        vec![0.0; n],
    )?
    .with_solution(vec![0.0; n]);
    Ok(BenchmarkProblem {
        name: name.into(),
        instance,
        optimum: Optimum::Point { z_star: vec![0.0; n] },
        optimal_value: 0.0,
        regimes: RegimeTags {
            strongly_convex: true,
            divergent_beta: false,
            heavy_ball: true,
        },
        provenance: "unconstrained strongly convex quadratic: the unique minimizer is the \
                     origin"
            .into(),
    })
}

/// Flat objective with no constraint (ψ = 0): S is the whole line {x₁ = 1}.
pub fn make_flat_heavy_ball_problem(
    name: impl Into<String>,
    gamma: f64,
) -> Result<BenchmarkProblem> {
    let phi = ConvexFunction::quadratic(
        vec![vec![1.0, 0.0], vec![0.0, 0.0]],
        vec![1.0, 0.0],
    )?
    .with_known_lower_bound(-0.5);
    let representative = vec![1.0, 0.0];
    let optimal_value = phi.eval(&representative)?;
    let instance = ProblemInstance::new(
        phi,
        PenaltyFunction::zero(2),
        gamma,
        PenaltySchedule::constant(1.0)?,
        vec![0.0, 0.0],
        vec![0.0, 0.0],
    )?
    .with_solution(representative.clone());
    Ok(BenchmarkProblem {
        name: name.into(),
        instance,
        optimum: Optimum::Set {
            set: ConvexSet::hyperplane(vec![1.0, 0.0], 1.0)?,
            representative,
        },
        optimal_value,
        regimes: RegimeTags {
            strongly_convex: false,
            divergent_beta: false,
            heavy_ball: true,
        },
        provenance: "unconstrained argmin of ½(x₁−1)² is the whole line x₁ = 1".into(),
    })
}

fn default_schedule() -> PenaltySchedule {
    PenaltySchedule::power(2.0).expect("valid family")
}

/// The named problems addressable from the CLI.
pub fn registry() -> Vec<BenchmarkProblem> {
    let mut problems = Vec::new();

    // flagship: projected center (2,0), optimal value 0.5
    problems.push(
        make_affine_constrained_quadratic(
            "affine-quadratic-2d",
            vec![2.0, 1.0],
            ConvexSet::hyperplane(vec![0.0, 1.0], 0.0).expect("line"),
            3.0,
            default_schedule(),
        )
        .expect("flagship"),
    );

    // mid-size: project a deterministic center onto the hyperplane Σx = 1
    let a10: Vec<f64> = (0..10).map(|i| 1.0 + 0.5 * i as f64).collect();
    problems.push(
        make_affine_constrained_quadratic(
            "affine-quadratic-10d",
            a10,
            ConvexSet::hyperplane(vec![1.0; 10], 1.0).expect("hyperplane"),
            3.0,
            default_schedule(),
        )
        .expect("10d"),
    );

    // performance-scale instance
    let a100: Vec<f64> = (0..100).map(|i| ((i % 7) as f64 - 3.0) / 2.0).collect();
    problems.push(
        make_affine_constrained_quadratic(
            "affine-quadratic-100d",
            a100,
            ConvexSet::hyperplane(vec![1.0; 100], 0.0).expect("hyperplane"),
            3.0,
            default_schedule(),
        )
        .expect("100d"),
    );

    // box constraint: z* = clamp(a) by the same projection argument
    problems.push(
        make_affine_constrained_quadratic(
            "box-2d",
            vec![2.0, 3.0],
            ConvexSet::hyper_box(vec![-1.0, -1.0], vec![1.0, 1.0]).expect("box"),
            3.0,
            default_schedule(),
        )
        .expect("box"),
    );

    problems.push(
        make_halfspace_problem(
            "halfspace-2d",
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            1.0,
            3.0,
            default_schedule(),
        )
        .expect("halfspace"),
    );

    problems.push(
        make_halfspace_problem(
            "halfspace-inactive-2d",
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            1.0,
            3.0,
            default_schedule(),
        )
        .expect("inactive halfspace"),
    );

    problems.push(
        make_flat_objective_problem("flat-ball-2d", 3.0, default_schedule()).expect("flat"),
    );

    problems
        .push(make_heavy_ball_problem("heavy-ball-2d", 1.0, vec![1.0, 0.0]).expect("heavy ball"));

    problems.push(make_flat_heavy_ball_problem("flat-heavy-ball-2d", 1.0).expect("flat hb"));

    problems
}

pub fn problem_by_name(name: &str) -> Result<BenchmarkProblem> {
    registry()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| CoreError::UnknownProblem(name.into()))
}
