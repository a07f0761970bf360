//! Closed convex sets with exact projections and support functions.
//!
//! Every set here answers three queries: nearest point, support value
//! σ_C(p) = sup_{x∈C} ⟨p,x⟩ (possibly +∞), and membership. Membership is
//! decided through the projection: x ∈ C iff ‖x − P_C(x)‖ ≤ 1e-8, the
//! tolerance matched to double-precision trajectory accuracy.
//!
//! The normal cone N_C is represented implicitly: p ∈ N_C(x) iff x ∈ C and
//! σ_C(p) = ⟨p,x⟩, which is also how points of `ran N_C` get certified.

use crate::error::{CoreError, Result};
use crate::extended::ExtReal;
use crate::vecmath::{dist, dot, norm, norm_sq, scale, sub};

/// Membership tolerance: ‖x − project(x)‖ ≤ MEMBERSHIP_TOL.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Relative tolerance for deciding that a direction lies in a cone/span.
const DIRECTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum ConvexSet {
    /// { x : ⟨normal, x⟩ = offset }
    Hyperplane { normal: Vec<f64>, offset: f64 },
    /// point + span(basis), basis orthonormal.
    AffineSubspace { point: Vec<f64>, basis: Vec<Vec<f64>> },
    /// { x : ⟨normal, x⟩ ≤ offset }
    Halfspace { normal: Vec<f64>, offset: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// All of ℝⁿ (the zero set of the zero penalty).
    WholeSpace { dim: usize },
}

impl ConvexSet {
    pub fn hyperplane(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if norm(&normal) <= 0.0 {
            return Err(CoreError::InvalidConstruction(
                "hyperplane normal must be nonzero".into(),
            ));
        }
        Ok(ConvexSet::Hyperplane { normal, offset })
    }

    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if norm(&normal) <= 0.0 {
            return Err(CoreError::InvalidConstruction(
                "halfspace normal must be nonzero".into(),
            ));
        }
        Ok(ConvexSet::Halfspace { normal, offset })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(CoreError::InvalidConstruction(format!(
                "ball radius must be nonnegative, got {radius}"
            )));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn hyper_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(CoreError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(CoreError::InvalidConstruction(
                "box lower bound exceeds upper bound".into(),
            ));
        }
        Ok(ConvexSet::Box { lower, upper })
    }

    /// Affine subspace through `point` spanned by `directions`.
    /// Directions are orthonormalized; a linearly dependent direction is an error.
    pub fn affine_subspace(point: Vec<f64>, directions: Vec<Vec<f64>>) -> Result<Self> {
        let n = point.len();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(directions.len());
        for d in directions {
            if d.len() != n {
                return Err(CoreError::DimensionMismatch {
                    expected: n,
                    got: d.len(),
                });
            }
            let original = norm(&d);
            let mut v = d;
            for e in &basis {
                let c = dot(&v, e);
                for (vi, ei) in v.iter_mut().zip(e) {
                    *vi -= c * ei;
                }
            }
            let r = norm(&v);
            if r <= 1e-12 * original.max(1.0) {
                return Err(CoreError::InvalidConstruction(
                    "affine subspace directions are linearly dependent".into(),
                ));
            }
            basis.push(scale(&v, 1.0 / r));
        }
        Ok(ConvexSet::AffineSubspace { point, basis })
    }

    /// A single point, as a zero-dimensional affine subspace.
    pub fn singleton(point: Vec<f64>) -> Self {
        ConvexSet::AffineSubspace {
            point,
            basis: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ConvexSet::Hyperplane { normal, .. } => normal.len(),
            ConvexSet::AffineSubspace { point, .. } => point.len(),
            ConvexSet::Halfspace { normal, .. } => normal.len(),
            ConvexSet::Ball { center, .. } => center.len(),
            ConvexSet::Box { lower, .. } => lower.len(),
            ConvexSet::WholeSpace { dim } => *dim,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(CoreError::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Nearest point of the set.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(match self {
            ConvexSet::Hyperplane { normal, offset } => {
                let t = (dot(normal, x) - offset) / norm_sq(normal);
                let mut y = x.to_vec();
                crate::vecmath::axpy(&mut y, -t, normal);
                y
            }
            ConvexSet::AffineSubspace { point, basis } => {
                let d = sub(x, point);
                let mut y = point.clone();
                for e in basis {
                    crate::vecmath::axpy(&mut y, dot(&d, e), e);
                }
                y
            }
            ConvexSet::Halfspace { normal, offset } => {
                let excess = dot(normal, x) - offset;
                if excess <= 0.0 {
                    x.to_vec()
                } else {
                    let mut y = x.to_vec();
                    crate::vecmath::axpy(&mut y, -excess / norm_sq(normal), normal);
                    y
                }
            }
            ConvexSet::Ball { center, radius } => {
                let d = sub(x, center);
                let r = norm(&d);
                if r <= *radius {
                    x.to_vec()
                } else {
                    let mut y = center.clone();
                    crate::vecmath::axpy(&mut y, radius / r, &d);
                    y
                }
            }
            ConvexSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| v.clamp(*l, *u))
                .collect(),
            ConvexSet::WholeSpace { .. } => x.to_vec(),
        })
    }

    /// Support function σ_C(p) = sup_{x∈C} ⟨p,x⟩.
    pub fn support(&self, p: &[f64]) -> Result<ExtReal> {
        self.check_dim(p)?;
        let pn = norm(p);
        Ok(match self {
            ConvexSet::Hyperplane { normal, offset } => {
                // finite iff p is parallel to the normal
                let s = dot(p, normal) / norm_sq(normal);
                let residual: f64 = p
                    .iter()
                    .zip(normal)
                    .map(|(pi, ni)| (pi - s * ni) * (pi - s * ni))
                    .sum::<f64>()
                    .sqrt();
                if residual <= DIRECTION_TOL * pn.max(1e-300) {
                    ExtReal::Finite(s * offset)
                } else {
                    ExtReal::PosInf
                }
            }
            ConvexSet::AffineSubspace { point, basis } => {
                // finite iff p ⟂ span(basis)
                let in_span: f64 = basis.iter().map(|e| dot(p, e).powi(2)).sum::<f64>().sqrt();
                if in_span <= DIRECTION_TOL * pn.max(1e-300) {
                    ExtReal::Finite(dot(p, point))
                } else {
                    ExtReal::PosInf
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                // finite iff p = s·normal with s ≥ 0
                let s = dot(p, normal) / norm_sq(normal);
                let residual: f64 = p
                    .iter()
                    .zip(normal)
                    .map(|(pi, ni)| (pi - s * ni) * (pi - s * ni))
                    .sum::<f64>()
                    .sqrt();
                if residual <= DIRECTION_TOL * pn.max(1e-300) && s >= -DIRECTION_TOL {
                    ExtReal::Finite(s.max(0.0) * offset)
                } else {
                    ExtReal::PosInf
                }
            }
            ConvexSet::Ball { center, radius } => ExtReal::Finite(dot(p, center) + radius * pn),
            ConvexSet::Box { lower, upper } => ExtReal::Finite(
                p.iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(pi, (l, u))| (pi * l).max(pi * u))
                    .sum(),
            ),
            ConvexSet::WholeSpace { .. } => {
                if pn == 0.0 {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PosInf
                }
            }
        })
    }

    /// Membership test with tolerance ‖x − project(x)‖ ≤ 1e-8.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        let proj = self.project(x)?;
        Ok(dist(x, &proj) <= MEMBERSHIP_TOL)
    }

    /// Some point of the set (sets here are always nonempty).
    pub fn witness_point(&self) -> Vec<f64> {
        match self {
            ConvexSet::Hyperplane { normal, offset }
            | ConvexSet::Halfspace { normal, offset } => {
                scale(normal, offset / norm_sq(normal))
            }
            ConvexSet::AffineSubspace { point, .. } => point.clone(),
            ConvexSet::Ball { center, .. } => center.clone(),
            ConvexSet::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| 0.5 * (l + u))
                .collect(),
            ConvexSet::WholeSpace { dim } => vec![0.0; *dim],
        }
    }

    /// A point attaining σ_C(p), when the support value is finite.
    pub fn support_witness(&self, p: &[f64]) -> Result<Option<Vec<f64>>> {
        self.check_dim(p)?;
        let sigma = match self.support(p)? {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => return Ok(None),
        };
        let candidate = match self {
            ConvexSet::Ball { center, radius } => {
                let pn = norm(p);
                if pn == 0.0 {
                    center.clone()
                } else {
                    let mut y = center.clone();
                    crate::vecmath::axpy(&mut y, radius / pn, p);
                    y
                }
            }
            ConvexSet::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .zip(p)
                .map(|((l, u), pi)| if *pi >= 0.0 { *u } else { *l })
                .collect(),
            _ => self.witness_point(),
        };
        let attained = dot(p, &candidate);
        if (attained - sigma).abs() <= 1e-8 * (1.0 + sigma.abs()) {
            Ok(Some(candidate))
        } else {
            Ok(None)
        }
    }
}
