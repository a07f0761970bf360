//! Property suites for the convex-calculus invariants: convexity gaps,
//! Lipschitz gradients, projection characterization, support homogeneity,
//! Fenchel-Young, and the conjugate identities the integrability check
//! leans on.

mod common;

use common::{function_zoo, line_x2_zero, random_point};
use penalty_flow::convex::{ConvexFunction, ConvexSet, PenaltyFunction};
use penalty_flow::diagnostics::condition_h_integrand;
use penalty_flow::schedule::PenaltySchedule;
use penalty_flow::vecmath::{dist, dot, norm, sub};
use penalty_flow::ExtReal;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn gradient_checks_for_all_library_functions() {
    common::check_gradients_everywhere(100).unwrap();
}

#[test]
fn fenchel_young_for_all_registered_pairs() {
    common::check_fenchel_young(100).unwrap();
}

#[test]
fn convexity_gap_and_lipschitz_on_sampled_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for entry in function_zoo() {
        let mu = entry.f.strong_convexity();
        let lip = entry.f.grad_lipschitz();
        for _ in 0..200 {
            let x = random_point(&mut rng, entry.f.dimension(), 10.0);
            let y = random_point(&mut rng, entry.f.dimension(), 10.0);
            let fx = entry.f.eval(&x).unwrap();
            let fy = entry.f.eval(&y).unwrap();
            let gx = entry.f.grad(&x).unwrap();
            let gy = entry.f.grad(&y).unwrap();
            let d = sub(&y, &x);
            // convexity gap, strengthened by μ when strongly convex
            let quad_term = 0.5 * mu * penalty_flow::vecmath::norm_sq(&d);
            assert!(
                fy >= fx + dot(&gx, &d) + quad_term - 1e-9,
                "{}: convexity gap violated",
                entry.name
            );
            // gradient Lipschitz upper bound
            assert!(
                dist(&gx, &gy) <= lip * norm(&d) + 1e-9,
                "{}: Lipschitz bound violated",
                entry.name
            );
            // known infimum is an actual lower bound
            if let Some(lb) = entry.f.lower_bound() {
                assert!(fx >= lb - 1e-9, "{}: value under the lower bound", entry.name);
            }
        }
    }
}

#[test]
fn penalty_invariants_on_sampled_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let penalties = [
        PenaltyFunction::squared_distance(line_x2_zero()),
        PenaltyFunction::squared_distance(ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap()),
        PenaltyFunction::huber_hinge(vec![1.0, 1.0], 1.0, 0.25).unwrap(),
        PenaltyFunction::zero(2),
    ];
    for psi in &penalties {
        for _ in 0..200 {
            let x = random_point(&mut rng, psi.dimension(), 10.0);
            let v = psi.eval(&x).unwrap();
            assert!(v >= 0.0);
            // ψ vanishes exactly on its zero set (within tolerance)
            if psi.zero_set().contains(&x).unwrap() {
                assert!(v <= 1e-12, "psi={v} inside the zero set");
            } else {
                assert!(v > 0.0);
            }
            let proj = psi.zero_set().project(&x).unwrap();
            assert!(norm(&psi.grad(&proj).unwrap()) <= 1e-9);
        }
    }
}

#[test]
fn dist2_conjugate_identity_and_sampled_sup() {
    // (½dist²)* = σ_C + ½‖·‖² where finite, and a sampled sup of
    // ⟨p,x⟩ − ψ(x) must stay below it (it is only a lower bound)
    let sets = [
        line_x2_zero(),
        ConvexSet::halfspace(vec![1.0, 1.0], 1.0).unwrap(),
        ConvexSet::ball(vec![0.5, 0.0], 1.0).unwrap(),
        ConvexSet::hyper_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for set in &sets {
        let f = ConvexFunction::squared_distance(set.clone());
        for i in 0..50 {
            let p = random_point(&mut rng, 2, 3.0);
            let sigma = set.support(&p).unwrap();
            let conj = f.conjugate(&p).unwrap();
            match (sigma, conj) {
                (ExtReal::Finite(s), ExtReal::Finite(c)) => {
                    let expected = s + 0.5 * penalty_flow::vecmath::norm_sq(&p);
                    assert!((c - expected).abs() <= 1e-9, "identity off: {c} vs {expected}");
                    // ψ* ≥ σ pointwise
                    assert!(c >= s - 1e-12);
                    let sampled = f
                        .conjugate_sampled_lower_bound(&p, 15.0, 2000, 100 + i)
                        .unwrap();
                    assert!(
                        sampled <= c + 1e-9,
                        "sampled sup {sampled} exceeded closed form {c}"
                    );
                }
                (ExtReal::PosInf, conj) => assert_eq!(conj, ExtReal::PosInf),
                (ExtReal::Finite(_), ExtReal::PosInf) => {
                    panic!("conjugate infinite where support is finite")
                }
            }
        }
    }
}

#[test]
fn condition_h_integrand_nonnegative_across_penalties_and_schedules() {
    let penalties = [
        PenaltyFunction::squared_distance(line_x2_zero()),
        PenaltyFunction::squared_distance(ConvexSet::ball(vec![0.0, 0.0], 2.0).unwrap()),
        PenaltyFunction::zero(2),
    ];
    let schedules = [
        PenaltySchedule::power(1.0).unwrap(),
        PenaltySchedule::power(2.5).unwrap(),
        PenaltySchedule::exponential(0.5, 0.3).unwrap(),
        PenaltySchedule::constant(2.0).unwrap(),
    ];
    for psi in &penalties {
        let p = match psi.base() {
            ConvexFunction::Zero { .. } => vec![0.0, 0.0],
            _ => vec![0.0, 1.5],
        };
        if psi.certify_normal_cone_range(&p).is_err() {
            continue;
        }
        for s in &schedules {
            for i in 0..300 {
                let t = 0.1 * i as f64;
                if let ExtReal::Finite(g) = condition_h_integrand(psi, s, &p, t).unwrap() {
                    assert!(g >= -1e-12, "integrand {g} at t={t}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    // The composite and energy-descent inequalities are theorems for every
    // feasible instance; scanning them along random trajectories is a
    // direct falsification attempt against the whole pipeline.
    #[test]
    fn trajectory_inequalities_hold_on_random_instances(
        a in prop::collection::vec(-4.0f64..4.0, 2),
        raw_normal in prop::collection::vec(-1.0f64..1.0, 2)
            .prop_filter("normal too small", |n| penalty_flow::vecmath::norm(n) > 0.3),
        offset in -2.0f64..2.0,
        (gamma, alpha) in (2.0f64..5.0)
            .prop_flat_map(|g| (Just(g), 1.2f64..(3.0f64.min(g - 0.2)))),
    ) {
        use penalty_flow::diagnostics::lyapunov_inequality_check;
        use penalty_flow::dynamics::{integrate, IntegratorConfig, SystemKind};
        use penalty_flow::problems::{certify, make_affine_constrained_quadratic};

        let set = ConvexSet::hyperplane(raw_normal, offset).unwrap();
        let bp = make_affine_constrained_quadratic(
            "random",
            a,
            set,
            gamma,
            PenaltySchedule::power(alpha).unwrap(),
        )
        .unwrap();
        certify(&bp).unwrap();

        let cfg = IntegratorConfig::adaptive(30.0).with_samples(601);
        let traj = integrate(&bp.instance, &cfg, SystemKind::SecondOrder).unwrap();

        let lb = bp.instance.phi.lower_bound().unwrap();
        for s in &traj.samples {
            prop_assert!(s.energy() >= lb - 1e-12);
        }

        let rep = lyapunov_inequality_check(&traj, &bp.instance, bp.z_star(), alpha).unwrap();
        prop_assert!(
            rep.composite.pass,
            "composite max {} > tol {} at t={} (gamma={gamma}, alpha={alpha})",
            rep.composite.max_lhs,
            rep.composite.tolerance,
            rep.composite.at_t
        );
        prop_assert!(
            rep.energy_descent.pass,
            "descent max {} > tol {} at t={}",
            rep.energy_descent.max_lhs,
            rep.energy_descent.tolerance,
            rep.energy_descent.at_t
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_characterization(
        x in prop::collection::vec(-20.0f64..20.0, 2),
        probe in prop::collection::vec(-20.0f64..20.0, 2),
        choice in 0usize..4,
    ) {
        let set = match choice {
            0 => line_x2_zero(),
            1 => ConvexSet::halfspace(vec![1.0, 1.0], 1.0).unwrap(),
            2 => ConvexSet::ball(vec![0.5, -0.5], 1.5).unwrap(),
            _ => ConvexSet::hyper_box(vec![-1.0, 0.0], vec![2.0, 3.0]).unwrap(),
        };
        let px = set.project(&x).unwrap();
        // idempotent within 1e-12
        prop_assert!(dist(&px, &set.project(&px).unwrap()) <= 1e-12);
        // ⟨x − Px, y − Px⟩ ≤ 0 for any feasible y
        let y = set.project(&probe).unwrap();
        let lhs = dot(&sub(&x, &px), &sub(&y, &px));
        prop_assert!(lhs <= 1e-9, "characterization violated: {lhs}");
    }

    #[test]
    fn support_is_positively_homogeneous(
        p in prop::collection::vec(-5.0f64..5.0, 2),
        s in 0.01f64..100.0,
        choice in 0usize..4,
    ) {
        let set = match choice {
            0 => line_x2_zero(),
            1 => ConvexSet::halfspace(vec![1.0, 1.0], 1.0).unwrap(),
            2 => ConvexSet::ball(vec![0.5, -0.5], 1.5).unwrap(),
            _ => ConvexSet::hyper_box(vec![-1.0, 0.0], vec![2.0, 3.0]).unwrap(),
        };
        let sp: Vec<f64> = p.iter().map(|v| s * v).collect();
        match (set.support(&p).unwrap(), set.support(&sp).unwrap()) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                prop_assert!((b - s * a).abs() <= 1e-9 * (1.0 + b.abs()));
            }
            (ExtReal::PosInf, other) => prop_assert_eq!(other, ExtReal::PosInf),
            (ExtReal::Finite(_), ExtReal::PosInf) => {
                prop_assert!(false, "homogeneity broke finiteness");
            }
        }
    }

    #[test]
    fn beta_tilde_shrinks_beta(
        alpha in 0.0f64..4.0,
        k_frac in 0.0f64..0.999,
        gamma in 0.1f64..10.0,
        t in 0.0f64..100.0,
    ) {
        let s = PenaltySchedule::power(alpha).unwrap();
        let k = k_frac * gamma;
        let bt = penalty_flow::schedule::beta_tilde(&s, k, gamma, t).unwrap();
        prop_assert!(bt > 0.0);
        prop_assert!(bt <= s.beta(t) + 1e-12);
    }
}
