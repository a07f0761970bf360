//! Library walkthrough on the flagship benchmark: integrate the damped
//! second-order penalty system, print the terminal metrics, and run the
//! main diagnostics.
//!
//!     cargo run --release --example flagship

use penalty_flow::diagnostics::{
    condition_h_check, convergence_report, dissipation_residual, lyapunov_inequality_check,
    ConvergenceOptions,
};
use penalty_flow::dynamics::{integrate, IntegratorConfig, SystemKind};
use penalty_flow::problems::problem_by_name;
use penalty_flow::vecmath::{dist, norm};

fn main() {
    let bp = problem_by_name("affine-quadratic-2d").expect("registry");
    let p = &bp.instance;
    let z = bp.z_star();

    let cfg = IntegratorConfig::adaptive(100.0).with_samples(10001);
    let traj = integrate(p, &cfg, SystemKind::SecondOrder).expect("integration");
    let end = traj.terminal();

    println!("terminal state      x(T) = {:?}", end.x);
    println!("distance to optimum      = {:.3e}", dist(&end.x, z));
    println!("objective gap            = {:.3e}", end.phi - bp.optimal_value);
    println!("beta(T) * psi(x(T))      = {:.3e}", end.beta * end.psi);
    println!("terminal speed |v(T)|    = {:.3e}", norm(&end.v));
    println!(
        "steps: {} accepted, {} rejected",
        traj.stats.steps_accepted, traj.stats.steps_rejected
    );

    let conv = convergence_report(&traj, p, z, &ConvergenceOptions::default()).expect("report");
    println!(
        "convergence verdicts pass = {} (int beta*psi tail ratio {:.2e})",
        conv.all_pass, conv.integral_beta_psi.cauchy_ratio
    );

    let lyap = lyapunov_inequality_check(&traj, p, z, 2.0).expect("inequalities");
    println!(
        "composite inequality max LHS {:.3e} (tol {:.3e}), descent max {:.3e} (tol {:.3e})",
        lyap.composite.max_lhs,
        lyap.composite.tolerance,
        lyap.energy_descent.max_lhs,
        lyap.energy_descent.tolerance
    );

    let dissipation = dissipation_residual(&traj, p).expect("residuals");
    println!(
        "dissipation identity max residual {:.3e} at output step {}",
        dissipation.max_residual, dissipation.grid_step
    );

    let minus_grad: Vec<f64> = p.phi.grad(z).unwrap().iter().map(|v| -v).collect();
    let h = condition_h_check(&p.psi, &p.schedule, &minus_grad, 1e4).expect("condition check");
    println!(
        "integrability of the conjugate gap along -grad phi(z): {:?} (value {})",
        h.verdict, h.value
    );
}
