//! Simulation and verification toolkit for the damped second-order penalty
//! dynamics ẍ + γẋ + ∇φ(x) + β(t)∇ψ(x) = 0 used to minimize a smooth convex
//! φ over the zero set of a smooth convex penalty ψ.
//!
//! The crate provides:
//! - a convex function/set library with exact gradients, projections,
//!   support functions, and closed-form Fenchel conjugates ([`convex`]);
//! - penalty schedules β(t) and a verifier for the growth condition
//!   0 ≤ β̇ ≤ kβ, k < γ ([`schedule`]);
//! - adaptive integration of the second-order system, its first-order
//!   baseline, and the heavy-ball special case ([`dynamics`]);
//! - Lyapunov-energy diagnostics, the conjugate-integrability check, and
//!   trajectory convergence reports ([`diagnostics`]);
//! - benchmark problems with certified analytic optima ([`problems`]);
//! - declarative JSON descriptors for all of the above ([`descriptor`]).

// `!(x > 0.0)` in validations is intentional: it rejects NaN, which the
// suggested `x <= 0.0` would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index-based loops mirror the stencil/tableau formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod convex;
pub mod descriptor;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod extended;
pub mod problems;
pub mod schedule;
pub mod vecmath;

pub use error::{CoreError, Result};
pub use extended::ExtReal;
