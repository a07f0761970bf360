//! Lyapunov-energy diagnostics, the conjugate-integrability check, and
//! trajectory convergence reports. Everything here is a pure function of
//! immutable inputs and can run concurrently across trajectories.

mod certify;
mod condition_h;
mod convergence;
mod energy;
mod fejer;
mod lyapunov;
mod quadrature;
mod stencil;

pub use certify::{certify_solution, require_certified, CertificateReport, OPTIMALITY_TOL};
pub use condition_h::{
    condition_h_check, condition_h_integrand, ConditionHReport, HMode, HVerdict,
    EXPONENT_DEAD_BAND,
};
pub use convergence::{
    convergence_report, ConvergenceOptions, ConvergenceReport, PartialIntegral, TailVerdict,
};
pub use energy::{dissipation_residual, energy_series, DissipationReport, EnergySample};
pub use fejer::{quasi_fejer_monitor, FejerOptions, FejerOrder, FejerReport, LimitVerdict};
pub use lyapunov::{lyapunov_inequality_check, InequalityScan, LyapunovReport};
pub use quadrature::{adaptive_simpson, QuadratureOutcome};
