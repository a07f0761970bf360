//! Shared fixtures for the property and acceptance suites: the library
//! function zoo, samplers for directions with finite conjugate values, and
//! the checks both suites run.

use penalty_flow::convex::{fd_gradient_check, ConvexFunction, ConvexSet};
use penalty_flow::vecmath::dot;
use penalty_flow::ExtReal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct ZooEntry {
    pub name: &'static str,
    pub f: ConvexFunction,
    /// Produces a direction p with f*(p) finite.
    pub finite_dir: fn(&mut ChaCha8Rng, &ConvexFunction) -> Vec<f64>,
}

fn any_dir(rng: &mut ChaCha8Rng, f: &ConvexFunction) -> Vec<f64> {
    (0..f.dimension()).map(|_| rng.random_range(-5.0..5.0)).collect()
}

fn gradient_dir(rng: &mut ChaCha8Rng, f: &ConvexFunction) -> Vec<f64> {
    // the gradient at a random point is always in the conjugate's domain
    let x: Vec<f64> = (0..f.dimension())
        .map(|_| rng.random_range(-5.0..5.0))
        .collect();
    f.grad(&x).expect("gradient")
}

pub fn line_x2_zero() -> ConvexSet {
    ConvexSet::hyperplane(vec![0.0, 1.0], 0.0).expect("line")
}

/// Every registered function family, at hand-checkable dimensions.
pub fn function_zoo() -> Vec<ZooEntry> {
    vec![
        ZooEntry {
            name: "shifted-squared-norm-2d",
            f: ConvexFunction::shifted_squared_norm(vec![2.0, 1.0]),
            finite_dir: any_dir,
        },
        ZooEntry {
            name: "shifted-squared-norm-10d",
            f: ConvexFunction::shifted_squared_norm((0..10).map(|i| i as f64 / 3.0).collect()),
            finite_dir: any_dir,
        },
        ZooEntry {
            name: "quadratic-pd-3d",
            f: ConvexFunction::quadratic(
                vec![
                    vec![2.0, 0.5, 0.0],
                    vec![0.5, 1.5, 0.2],
                    vec![0.0, 0.2, 1.0],
                ],
                vec![1.0, -1.0, 0.5],
            )
            .expect("pd quadratic"),
            finite_dir: any_dir,
        },
        ZooEntry {
            name: "quadratic-singular-2d",
            f: ConvexFunction::quadratic(vec![vec![1.0, 0.0], vec![0.0, 0.0]], vec![0.0, 0.0])
                .expect("singular quadratic"),
            finite_dir: gradient_dir, // no conjugate; sampler unused
        },
        ZooEntry {
            name: "dist2-line",
            f: ConvexFunction::squared_distance(line_x2_zero()),
            finite_dir: gradient_dir,
        },
        ZooEntry {
            name: "dist2-halfspace",
            f: ConvexFunction::squared_distance(
                ConvexSet::halfspace(vec![1.0, 1.0], 1.0).expect("halfspace"),
            ),
            finite_dir: gradient_dir,
        },
        ZooEntry {
            name: "dist2-ball",
            f: ConvexFunction::squared_distance(
                ConvexSet::ball(vec![0.5, -0.5], 1.5).expect("ball"),
            ),
            finite_dir: any_dir,
        },
        ZooEntry {
            name: "dist2-box",
            f: ConvexFunction::squared_distance(
                ConvexSet::hyper_box(vec![-1.0, -2.0], vec![1.0, 0.0]).expect("box"),
            ),
            finite_dir: any_dir,
        },
        ZooEntry {
            name: "log-sum-exp-4d",
            f: ConvexFunction::log_sum_exp(4),
            finite_dir: gradient_dir, // softmax lands on the simplex
        },
        ZooEntry {
            name: "huber-hinge-2d",
            f: ConvexFunction::huber_hinge(vec![1.0, -1.0], 0.5, 0.25).expect("huber"),
            finite_dir: gradient_dir,
        },
        ZooEntry {
            name: "zero-3d",
            f: ConvexFunction::zero(3),
            finite_dir: |_, f| vec![0.0; f.dimension()],
        },
    ]
}

pub fn random_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-radius..radius)).collect()
}

/// Spec suite: central-difference gradient agreement at `count` random
/// points of [−10,10]ⁿ for every library function.
pub fn check_gradients_everywhere(count: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for entry in function_zoo() {
        for i in 0..count {
            let x = random_point(&mut rng, entry.f.dimension(), 10.0);
            let err = fd_gradient_check(&entry.f, &x, 1e-6)
                .map_err(|e| format!("{}: {e}", entry.name))?;
            if err > 1e-5 {
                return Err(format!(
                    "{} at point #{i} {x:?}: relative fd error {err:.3e} > 1e-5",
                    entry.name
                ));
            }
        }
    }
    Ok(())
}

/// Spec suite: Fenchel-Young nonnegativity at random (x,p) with f*(p)
/// finite, and near-equality when p is the gradient at x.
pub fn check_fenchel_young(count: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for entry in function_zoo() {
        if !entry.f.has_conjugate() {
            continue;
        }
        let mut finite_seen = 0;
        for _ in 0..count {
            let x = random_point(&mut rng, entry.f.dimension(), 5.0);
            let p = (entry.finite_dir)(&mut rng, &entry.f);
            let conj = entry
                .f
                .conjugate(&p)
                .map_err(|e| format!("{}: {e}", entry.name))?;
            let ExtReal::Finite(fstar) = conj else {
                continue;
            };
            finite_seen += 1;
            let gap = entry.f.eval(&x).unwrap() + fstar - dot(&p, &x);
            if gap < -1e-9 {
                return Err(format!(
                    "{}: Fenchel-Young violated by {gap:.3e} at x={x:?}, p={p:?}",
                    entry.name
                ));
            }
            // equality when p = ∇f(x)
            let g = entry.f.grad(&x).unwrap();
            if let ExtReal::Finite(fstar_g) = entry.f.conjugate(&g).unwrap() {
                let eq_gap = entry.f.eval(&x).unwrap() + fstar_g - dot(&g, &x);
                if eq_gap.abs() > 1e-7 {
                    return Err(format!(
                        "{}: equality at gradient off by {eq_gap:.3e} at x={x:?}",
                        entry.name
                    ));
                }
            }
        }
        if finite_seen == 0 {
            return Err(format!("{}: sampler never hit the conjugate domain", entry.name));
        }
    }
    Ok(())
}
