//! Penalty functions: nonnegative smooth convex functions whose argmin is a
//! known closed convex set on which they vanish (argmin ψ = ψ⁻¹(0)).

use crate::convex::functions::ConvexFunction;
use crate::convex::sets::ConvexSet;
use crate::error::{CoreError, Result};
use crate::extended::ExtReal;
use crate::vecmath::norm;

#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyFunction {
    base: ConvexFunction,
    zero_set: ConvexSet,
}

impl PenaltyFunction {
    /// ψ = ½ dist²(·, C), the canonical penalty of the dist² construction.
    pub fn squared_distance(set: ConvexSet) -> Self {
        PenaltyFunction {
            base: ConvexFunction::squared_distance(set.clone()),
            zero_set: set,
        }
    }

    /// ψ = 0, the heavy-ball regime: the whole space minimizes the penalty.
    pub fn zero(dim: usize) -> Self {
        PenaltyFunction {
            base: ConvexFunction::zero(dim),
            zero_set: ConvexSet::WholeSpace { dim },
        }
    }

    /// Huber-smoothed hinge of a halfspace constraint ⟨u,x⟩ ≤ b.
    pub fn huber_hinge(normal: Vec<f64>, offset: f64, delta: f64) -> Result<Self> {
        let base = ConvexFunction::huber_hinge(normal.clone(), offset, delta)?;
        Ok(PenaltyFunction {
            base,
            zero_set: ConvexSet::halfspace(normal, offset)?,
        })
    }

    /// Pair an arbitrary nonnegative function with its claimed zero set.
    /// Construction checks the cheap consistency conditions; the full sampled
    /// invariants live in the property-test suite.
    pub fn from_parts(base: ConvexFunction, zero_set: ConvexSet) -> Result<Self> {
        if base.dimension() != zero_set.dimension() {
            return Err(CoreError::DimensionMismatch {
                expected: base.dimension(),
                got: zero_set.dimension(),
            });
        }
        if base.lower_bound().is_none_or(|lb| lb < -1e-12) {
            return Err(CoreError::InvalidConstruction(
                "penalty base must be bounded below by zero".into(),
            ));
        }
        let witness = zero_set.witness_point();
        let value = base.eval(&witness)?;
        if value.abs() > 1e-12 {
            return Err(CoreError::InvalidConstruction(format!(
                "penalty does not vanish on its zero set: value {value} at witness"
            )));
        }
        let grad_norm = norm(&base.grad(&witness)?);
        if grad_norm > 1e-9 {
            return Err(CoreError::InvalidConstruction(format!(
                "penalty gradient does not vanish on its zero set: norm {grad_norm}"
            )));
        }
        Ok(PenaltyFunction { base, zero_set })
    }

    pub fn base(&self) -> &ConvexFunction {
        &self.base
    }

    pub fn zero_set(&self) -> &ConvexSet {
        &self.zero_set
    }

    pub fn dimension(&self) -> usize {
        self.base.dimension()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.base.eval(x)
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.base.grad(x)
    }

    pub fn grad_lipschitz(&self) -> f64 {
        self.base.grad_lipschitz()
    }

    pub fn has_conjugate(&self) -> bool {
        self.base.has_conjugate()
    }

    pub fn conjugate(&self, p: &[f64]) -> Result<ExtReal> {
        self.base.conjugate(p)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.base, ConvexFunction::Zero { .. })
    }

    /// Certify p ∈ ran N_{argmin ψ}: find x ∈ argmin ψ with σ(p) = ⟨p,x⟩.
    /// Returns the witness, or an error describing why no witness exists.
    pub fn certify_normal_cone_range(&self, p: &[f64]) -> Result<Vec<f64>> {
        let sigma = self.zero_set.support(p)?;
        if !sigma.is_finite() {
            return Err(CoreError::NormalConeCertificateFailed(format!(
                "support value is +inf for p = {p:?}, so no x in the set attains it"
            )));
        }
        match self.zero_set.support_witness(p)? {
            Some(w) => Ok(w),
            None => Err(CoreError::NormalConeCertificateFailed(format!(
                "no point of the zero set attains the support value for p = {p:?}"
            ))),
        }
    }
}
