//! Convex calculus: function and set algebra with exact gradients,
//! projections, support functions, and closed-form Fenchel conjugates.

mod functions;
mod penalty;
mod sets;

pub use functions::{fd_check_raw, fd_gradient_check, ConvexFunction};
pub use penalty::PenaltyFunction;
pub use sets::{ConvexSet, MEMBERSHIP_TOL};
