//! Penalty schedules β(t) and the growth-condition verifier.
//!
//! The admissible growth is 0 ≤ β̇ ≤ kβ with 0 ≤ k < γ, optionally required
//! only from some t₀ ≥ 0 onwards. For the registered families the smallest
//! admissible k over [t₀,∞) has a closed form; a grid supremum of β̇/β only
//! under-estimates it, so the analytic value decides and the grid serves as
//! a cross-check (and as the sole basis for custom schedules).

use std::fmt;
use std::sync::Arc;

use crate::error::{CoreError, Result};

type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum PenaltySchedule {
    /// β(t) = (1+t)^α, α ≥ 0.
    Power { alpha: f64 },
    /// β(t) = β₀ e^{kt}, β₀ > 0, k ≥ 0.
    Exponential { beta0: f64, k: f64 },
    /// β(t) = β₀ > 0.
    Constant { beta0: f64 },
    /// User-supplied β and β̇ with a claimed growth constant. Verified on a
    /// grid only; the verdict is marked grid-checked, never proved.
    Custom {
        beta: TimeFn,
        beta_dot: TimeFn,
        claimed_k: f64,
        divergent: bool,
        label: String,
    },
}

impl fmt::Debug for PenaltySchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PenaltySchedule::Power { alpha } => write!(f, "Power {{ alpha: {alpha} }}"),
            PenaltySchedule::Exponential { beta0, k } => {
                write!(f, "Exponential {{ beta0: {beta0}, k: {k} }}")
            }
            PenaltySchedule::Constant { beta0 } => write!(f, "Constant {{ beta0: {beta0} }}"),
            PenaltySchedule::Custom {
                claimed_k, label, ..
            } => write!(f, "Custom {{ label: {label:?}, claimed_k: {claimed_k} }}"),
        }
    }
}

impl PenaltySchedule {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(CoreError::InvalidConstruction(format!(
                "power schedule exponent must be nonnegative, got {alpha}"
            )));
        }
        Ok(PenaltySchedule::Power { alpha })
    }

    pub fn exponential(beta0: f64, k: f64) -> Result<Self> {
        if !(beta0 > 0.0) || !(k >= 0.0) {
            return Err(CoreError::InvalidConstruction(format!(
                "exponential schedule needs beta0 > 0 and k >= 0, got beta0={beta0}, k={k}"
            )));
        }
        Ok(PenaltySchedule::Exponential { beta0, k })
    }

    pub fn constant(beta0: f64) -> Result<Self> {
        if !(beta0 > 0.0) {
            return Err(CoreError::InvalidConstruction(format!(
                "constant schedule needs beta0 > 0, got {beta0}"
            )));
        }
        Ok(PenaltySchedule::Constant { beta0 })
    }

    pub fn custom(
        label: impl Into<String>,
        beta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        beta_dot: impl Fn(f64) -> f64 + Send + Sync + 'static,
        claimed_k: f64,
        divergent: bool,
    ) -> Self {
        PenaltySchedule::Custom {
            beta: Arc::new(beta),
            beta_dot: Arc::new(beta_dot),
            claimed_k,
            divergent,
            label: label.into(),
        }
    }

    /// The schedule c·β(t), used to evaluate condition (H) against
    /// β̃ = (1 − k/γ)β. Scaling drops out of every growth quantity.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(CoreError::InvalidConstruction(format!(
                "schedule scale factor must be positive, got {factor}"
            )));
        }
        let inner = self.clone();
        let inner2 = self.clone();
        Ok(PenaltySchedule::custom(
            format!("{factor}*{self:?}"),
            move |t| factor * inner.beta(t),
            move |t| factor * inner2.beta_dot(t),
            self.growth_constant_from(0.0),
            self.is_divergent(),
        ))
    }

    pub fn beta(&self, t: f64) -> f64 {
        match self {
            PenaltySchedule::Power { alpha } => (1.0 + t).powf(*alpha),
            PenaltySchedule::Exponential { beta0, k } => beta0 * (k * t).exp(),
            PenaltySchedule::Constant { beta0 } => *beta0,
            PenaltySchedule::Custom { beta, .. } => beta(t),
        }
    }

    pub fn beta_dot(&self, t: f64) -> f64 {
        match self {
            PenaltySchedule::Power { alpha } => {
                if *alpha == 0.0 {
                    0.0
                } else {
                    alpha * (1.0 + t).powf(alpha - 1.0)
                }
            }
            PenaltySchedule::Exponential { beta0, k } => k * beta0 * (k * t).exp(),
            PenaltySchedule::Constant { .. } => 0.0,
            PenaltySchedule::Custom { beta_dot, .. } => beta_dot(t),
        }
    }

    /// Whether β(t) → +∞ as t → ∞.
    pub fn is_divergent(&self) -> bool {
        match self {
            PenaltySchedule::Power { alpha } => *alpha > 0.0,
            PenaltySchedule::Exponential { k, .. } => *k > 0.0,
            PenaltySchedule::Constant { .. } => false,
            PenaltySchedule::Custom { divergent, .. } => *divergent,
        }
    }

    /// sup over [t0, ∞) of β̇/β for the registered families (closed form),
    /// or the claimed constant for custom schedules.
    pub fn growth_constant_from(&self, t0: f64) -> f64 {
        match self {
            // β̇/β = α/(1+t), decreasing, supremum at t0
            PenaltySchedule::Power { alpha } => alpha / (1.0 + t0),
            PenaltySchedule::Exponential { k, .. } => *k,
            PenaltySchedule::Constant { .. } => 0.0,
            PenaltySchedule::Custom { claimed_k, .. } => *claimed_k,
        }
    }

    pub fn label(&self) -> String {
        match self {
            PenaltySchedule::Custom { label, .. } => label.clone(),
            other => format!("{other:?}"),
        }
    }
}

/// How the growth constant in a report was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthBasis {
    /// Closed-form supremum of β̇/β for a registered family.
    Analytic,
    /// Grid supremum only (custom schedule); not a proof.
    GridChecked,
}

/// Outcome of checking 0 ≤ β̇ ≤ kβ with k < γ on [t0, ∞).
#[derive(Clone, Debug, serde::Serialize)]
pub struct GrowthReport {
    pub feasible: bool,
    /// Infimum feasible growth constant over [t0, ∞).
    pub k_min: f64,
    pub t0: f64,
    pub gamma: f64,
    /// γ − k_min.
    pub margin: f64,
    pub basis: GrowthBasis,
    /// Limit conclusions that need β → ∞ do not follow under this schedule.
    pub divergent: bool,
    pub reason: Option<String>,
}

/// β̃(t) = (1 − k/γ)·β(t).
pub fn beta_tilde(s: &PenaltySchedule, k: f64, gamma: f64, t: f64) -> Result<f64> {
    if !(k >= 0.0) || k >= gamma {
        return Err(CoreError::GrowthConstantOutOfRange { k, gamma });
    }
    Ok((1.0 - k / gamma) * s.beta(t))
}

/// Verify the growth condition for `s` against damping `gamma` on [t0, ∞),
/// cross-checking β̇ sign and β̇/β on `grid` (times are offsets ≥ t0 merged
/// with a default refinement of [t0, t0 + 100]).
pub fn verify_growth(
    s: &PenaltySchedule,
    gamma: f64,
    t0: f64,
    grid: &[f64],
) -> Result<GrowthReport> {
    if !(gamma > 0.0) {
        return Err(CoreError::InvalidConstruction(format!(
            "damping gamma must be positive, got {gamma}"
        )));
    }
    if !(t0 >= 0.0) {
        return Err(CoreError::InvalidConstruction(format!(
            "t0 must be nonnegative, got {t0}"
        )));
    }

    let mut points: Vec<f64> = (0..=400).map(|i| t0 + 0.25 * i as f64).collect();
    points.extend(grid.iter().copied().filter(|&t| t >= t0));
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut grid_sup = 0.0f64;
    for &t in &points {
        let b = s.beta(t);
        if !(b > 0.0) {
            return Err(CoreError::InvalidConstruction(format!(
                "schedule is not positive at t={t}: beta={b}"
            )));
        }
        let bd = s.beta_dot(t);
        if bd < -1e-12 {
            return Ok(GrowthReport {
                feasible: false,
                k_min: f64::NAN,
                t0,
                gamma,
                margin: f64::NAN,
                basis: basis_of(s),
                divergent: s.is_divergent(),
                reason: Some(format!("nonincreasing schedule: beta_dot({t}) = {bd}")),
            });
        }
        grid_sup = grid_sup.max(bd / b);
    }

    let k_min = match s {
        PenaltySchedule::Custom { .. } => grid_sup.max(s.growth_constant_from(t0)),
        _ => {
            let analytic = s.growth_constant_from(t0);
            debug_assert!(
                grid_sup <= analytic * (1.0 + 1e-9) + 1e-12,
                "grid sup {grid_sup} exceeds analytic k_min {analytic}"
            );
            analytic
        }
    };

    let feasible = k_min < gamma;
    Ok(GrowthReport {
        feasible,
        k_min,
        t0,
        gamma,
        margin: gamma - k_min,
        basis: basis_of(s),
        divergent: s.is_divergent(),
        reason: if feasible {
            None
        } else {
            Some(format!("k_min={k_min} >= gamma={gamma}"))
        },
    })
}

fn basis_of(s: &PenaltySchedule) -> GrowthBasis {
    match s {
        PenaltySchedule::Custom { .. } => GrowthBasis::GridChecked,
        _ => GrowthBasis::Analytic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_tilde_examples() {
        // (1 − 2/4)·(1+1)² = 2
        let s = PenaltySchedule::power(2.0).unwrap();
        assert_eq!(beta_tilde(&s, 2.0, 4.0, 1.0).unwrap(), 2.0);
        // k = 0 leaves beta unchanged
        assert_eq!(beta_tilde(&s, 0.0, 4.0, 3.0).unwrap(), s.beta(3.0));
        // (1 − 0.5/1)·e⁰ = 0.5
        let e = PenaltySchedule::exponential(1.0, 0.5).unwrap();
        assert_eq!(beta_tilde(&e, 0.5, 1.0, 0.0).unwrap(), 0.5);
        // k ≥ gamma is a hard error
        assert!(beta_tilde(&s, 4.0, 4.0, 1.0).is_err());
    }

    #[test]
    fn growth_verifier_examples() {
        let quad = PenaltySchedule::power(2.0).unwrap();
        let r = verify_growth(&quad, 3.0, 0.0, &[]).unwrap();
        assert!(r.feasible);
        assert_eq!(r.k_min, 2.0);
        assert_eq!(r.margin, 1.0);
        assert_eq!(r.basis, GrowthBasis::Analytic);

        let quartic = PenaltySchedule::power(4.0).unwrap();
        let r = verify_growth(&quartic, 3.0, 0.0, &[]).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.k_min, 4.0);

        let exp = PenaltySchedule::exponential(1.0, 0.5).unwrap();
        let r = verify_growth(&exp, 1.0, 0.0, &[]).unwrap();
        assert!(r.feasible);
        assert_eq!(r.k_min, 0.5);
    }

    #[test]
    fn t0_relaxation_admits_later_feasibility() {
        // α/(1+t0): 4/(1+1) = 2 < 3, so the quartic passes from t0 = 1
        let quartic = PenaltySchedule::power(4.0).unwrap();
        assert!(!verify_growth(&quartic, 3.0, 0.0, &[]).unwrap().feasible);
        let r = verify_growth(&quartic, 3.0, 1.0, &[]).unwrap();
        assert!(r.feasible);
        assert_eq!(r.k_min, 2.0);
    }

    #[test]
    fn feasibility_boundary_behavior() {
        // power family flips right at gamma = k_min
        let s = PenaltySchedule::power(2.0).unwrap();
        assert!(verify_growth(&s, 2.0 + 1e-6, 0.0, &[]).unwrap().feasible);
        assert!(!verify_growth(&s, 2.0 - 1e-6, 0.0, &[]).unwrap().feasible);
        assert!(!verify_growth(&s, 2.0, 0.0, &[]).unwrap().feasible); // strict k < gamma
    }

    #[test]
    fn constant_schedule_is_admitted_but_flagged_nondivergent() {
        let c = PenaltySchedule::constant(5.0).unwrap();
        let r = verify_growth(&c, 0.5, 0.0, &[]).unwrap();
        assert!(r.feasible);
        assert_eq!(r.k_min, 0.0);
        assert!(!r.divergent);
    }

    #[test]
    fn nonincreasing_custom_schedule_rejected_with_reason() {
        let s = PenaltySchedule::custom(
            "decaying",
            |t| (-t).exp(),
            |t| -(-t).exp(),
            0.0,
            false,
        );
        let r = verify_growth(&s, 1.0, 0.0, &[]).unwrap();
        assert!(!r.feasible);
        assert!(r.reason.as_deref().unwrap().contains("nonincreasing"));
    }

    #[test]
    fn custom_schedule_is_grid_checked() {
        // β(t) = 1 + t: β̇/β = 1/(1+t), claimed k = 1 covers the grid sup
        let s = PenaltySchedule::custom("linear", |t| 1.0 + t, |_| 1.0, 1.0, true);
        let r = verify_growth(&s, 2.0, 0.0, &[]).unwrap();
        assert!(r.feasible);
        assert_eq!(r.basis, GrowthBasis::GridChecked);
        assert_eq!(r.k_min, 1.0);
    }

    #[test]
    fn beta_dot_matches_central_difference() {
        let schedules = [
            PenaltySchedule::power(2.5).unwrap(),
            PenaltySchedule::exponential(0.7, 0.3).unwrap(),
            PenaltySchedule::constant(4.0).unwrap(),
        ];
        let h = 1e-5;
        for s in &schedules {
            for i in 0..60 {
                let t = 0.1 + 0.5 * i as f64;
                let fd = (s.beta(t + h) - s.beta(t - h)) / (2.0 * h);
                let bd = s.beta_dot(t);
                assert!(
                    (fd - bd).abs() <= 1e-6 * bd.abs().max(1.0),
                    "{s:?} at t={t}: fd={fd} beta_dot={bd}"
                );
            }
        }
    }

    #[test]
    fn divergent_flag_consistency_on_registered_families() {
        for s in [
            PenaltySchedule::power(1.0).unwrap(),
            PenaltySchedule::power(2.0).unwrap(),
            PenaltySchedule::power(3.0).unwrap(),
            PenaltySchedule::exponential(1.0, 0.5).unwrap(),
        ] {
            assert!(s.is_divergent());
            assert!(s.beta(1e6) > 1e3 * s.beta(0.0), "{s:?}");
        }
        let c = PenaltySchedule::constant(2.0).unwrap();
        assert!(!c.is_divergent());
    }

    #[test]
    fn scaled_schedule_preserves_growth_quantities() {
        let s = PenaltySchedule::power(2.0).unwrap();
        let scaled = s.scaled(1.0 / 3.0).unwrap();
        assert!((scaled.beta(1.0) - 4.0 / 3.0).abs() < 1e-15);
        let r = verify_growth(&scaled, 3.0, 0.0, &[]).unwrap();
        assert!(r.feasible);
        assert!((r.k_min - 2.0).abs() < 1e-9);
    }
}
