//! Declarative JSON descriptors for sets, functions, penalties, schedules,
//! and whole problem instances.
//!
//! All descriptors are tagged unions; unknown keys are rejected so a typo in
//! a config cannot silently change an experiment. The schema is documented
//! in the repository README.

use serde::{Deserialize, Serialize};

use crate::convex::{ConvexFunction, ConvexSet, PenaltyFunction};
use crate::dynamics::ProblemInstance;
use crate::error::{CoreError, Result};
use crate::problems::problem_by_name;
use crate::schedule::PenaltySchedule;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetDescriptor {
    Hyperplane { normal: Vec<f64>, offset: f64 },
    Halfspace { normal: Vec<f64>, offset: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Affine { point: Vec<f64>, directions: Vec<Vec<f64>> },
    WholeSpace { dim: usize },
}

impl SetDescriptor {
    pub fn build(&self) -> Result<ConvexSet> {
        match self.clone() {
            SetDescriptor::Hyperplane { normal, offset } => ConvexSet::hyperplane(normal, offset),
            SetDescriptor::Halfspace { normal, offset } => ConvexSet::halfspace(normal, offset),
            SetDescriptor::Ball { center, radius } => ConvexSet::ball(center, radius),
            SetDescriptor::Box { lower, upper } => ConvexSet::hyper_box(lower, upper),
            SetDescriptor::Affine { point, directions } => {
                ConvexSet::affine_subspace(point, directions)
            }
            SetDescriptor::WholeSpace { dim } => Ok(ConvexSet::WholeSpace { dim }),
        }
    }

    pub fn describe(set: &ConvexSet) -> SetDescriptor {
        match set {
            ConvexSet::Hyperplane { normal, offset } => SetDescriptor::Hyperplane {
                normal: normal.clone(),
                offset: *offset,
            },
            ConvexSet::Halfspace { normal, offset } => SetDescriptor::Halfspace {
                normal: normal.clone(),
                offset: *offset,
            },
            ConvexSet::Ball { center, radius } => SetDescriptor::Ball {
                center: center.clone(),
                radius: *radius,
            },
            ConvexSet::Box { lower, upper } => SetDescriptor::Box {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            ConvexSet::AffineSubspace { point, basis } => SetDescriptor::Affine {
                point: point.clone(),
                directions: basis.clone(),
            },
            ConvexSet::WholeSpace { dim } => SetDescriptor::WholeSpace { dim: *dim },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionDescriptor {
    Quadratic {
        matrix: Vec<Vec<f64>>,
        linear: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        lower_bound: Option<f64>,
    },
    ShiftedNorm {
        center: Vec<f64>,
    },
    Dist2 {
        set: SetDescriptor,
    },
    LogSumExp {
        dim: usize,
    },
    HuberHinge {
        normal: Vec<f64>,
        offset: f64,
        delta: f64,
    },
    Zero {
        dim: usize,
    },
}

impl FunctionDescriptor {
    pub fn build(&self) -> Result<ConvexFunction> {
        match self.clone() {
            FunctionDescriptor::Quadratic {
                matrix,
                linear,
                lower_bound,
            } => {
                let f = ConvexFunction::quadratic(matrix, linear)?;
                Ok(match lower_bound {
                    Some(b) => f.with_known_lower_bound(b),
                    None => f,
                })
            }
            FunctionDescriptor::ShiftedNorm { center } => {
                Ok(ConvexFunction::shifted_squared_norm(center))
            }
            FunctionDescriptor::Dist2 { set } => {
                Ok(ConvexFunction::squared_distance(set.build()?))
            }
            FunctionDescriptor::LogSumExp { dim } => Ok(ConvexFunction::log_sum_exp(dim)),
            FunctionDescriptor::HuberHinge {
                normal,
                offset,
                delta,
            } => ConvexFunction::huber_hinge(normal, offset, delta),
            FunctionDescriptor::Zero { dim } => Ok(ConvexFunction::zero(dim)),
        }
    }

    pub fn describe(f: &ConvexFunction) -> FunctionDescriptor {
        match f {
            ConvexFunction::Quadratic {
                matrix,
                linear,
                lower,
                ..
            } => FunctionDescriptor::Quadratic {
                matrix: matrix.clone(),
                linear: linear.clone(),
                lower_bound: *lower,
            },
            ConvexFunction::ShiftedSquaredNorm { center } => FunctionDescriptor::ShiftedNorm {
                center: center.clone(),
            },
            ConvexFunction::SquaredDistance { set } => FunctionDescriptor::Dist2 {
                set: SetDescriptor::describe(set),
            },
            ConvexFunction::LogSumExp { dim } => FunctionDescriptor::LogSumExp { dim: *dim },
            ConvexFunction::HuberHinge {
                normal,
                offset,
                delta,
            } => FunctionDescriptor::HuberHinge {
                normal: normal.clone(),
                offset: *offset,
                delta: *delta,
            },
            ConvexFunction::Zero { dim } => FunctionDescriptor::Zero { dim: *dim },
        }
    }
}

/// Penalty-capable subset: nonnegative with a known zero set.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PenaltyDescriptor {
    Dist2 {
        set: SetDescriptor,
    },
    HuberHinge {
        normal: Vec<f64>,
        offset: f64,
        delta: f64,
    },
    Zero {
        dim: usize,
    },
}

impl PenaltyDescriptor {
    pub fn build(&self) -> Result<PenaltyFunction> {
        match self.clone() {
            PenaltyDescriptor::Dist2 { set } => {
                Ok(PenaltyFunction::squared_distance(set.build()?))
            }
            PenaltyDescriptor::HuberHinge {
                normal,
                offset,
                delta,
            } => PenaltyFunction::huber_hinge(normal, offset, delta),
            PenaltyDescriptor::Zero { dim } => Ok(PenaltyFunction::zero(dim)),
        }
    }

    pub fn describe(psi: &PenaltyFunction) -> Result<PenaltyDescriptor> {
        Ok(match psi.base() {
            ConvexFunction::SquaredDistance { set } => PenaltyDescriptor::Dist2 {
                set: SetDescriptor::describe(set),
            },
            ConvexFunction::HuberHinge {
                normal,
                offset,
                delta,
            } => PenaltyDescriptor::HuberHinge {
                normal: normal.clone(),
                offset: *offset,
                delta: *delta,
            },
            ConvexFunction::Zero { dim } => PenaltyDescriptor::Zero { dim: *dim },
            other => {
                return Err(CoreError::InvalidDescriptor(format!(
                    "penalty base '{}' has no descriptor form",
                    other.name()
                )))
            }
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleDescriptor {
    Power { alpha: f64 },
    Exp { beta0: f64, k: f64 },
    Const { beta0: f64 },
}

impl ScheduleDescriptor {
    pub fn build(&self) -> Result<PenaltySchedule> {
        match *self {
            ScheduleDescriptor::Power { alpha } => PenaltySchedule::power(alpha),
            ScheduleDescriptor::Exp { beta0, k } => PenaltySchedule::exponential(beta0, k),
            ScheduleDescriptor::Const { beta0 } => PenaltySchedule::constant(beta0),
        }
    }

    pub fn describe(s: &PenaltySchedule) -> Result<ScheduleDescriptor> {
        Ok(match s {
            PenaltySchedule::Power { alpha } => ScheduleDescriptor::Power { alpha: *alpha },
            PenaltySchedule::Exponential { beta0, k } => ScheduleDescriptor::Exp {
                beta0: *beta0,
                k: *k,
            },
            PenaltySchedule::Constant { beta0 } => ScheduleDescriptor::Const { beta0: *beta0 },
            PenaltySchedule::Custom { label, .. } => {
                return Err(CoreError::InvalidDescriptor(format!(
                    "custom schedule '{label}' has no descriptor form"
                )))
            }
        })
    }
}

/// A problem: either a registry name or a full inline description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ProblemDescriptor {
    Named(String),
    Inline(Box<InlineProblem>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InlineProblem {
    pub phi: FunctionDescriptor,
    pub psi: PenaltyDescriptor,
    pub gamma: f64,
    pub schedule: ScheduleDescriptor,
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_star: Option<Vec<f64>>,
}

impl ProblemDescriptor {
    pub fn build(&self) -> Result<ProblemInstance> {
        match self {
            ProblemDescriptor::Named(name) => Ok(problem_by_name(name)?.instance),
            ProblemDescriptor::Inline(inline) => {
                let p = ProblemInstance::new(
                    inline.phi.build()?,
                    inline.psi.build()?,
                    inline.gamma,
                    inline.schedule.build()?,
                    inline.u0.clone(),
                    inline.v0.clone(),
                )?;
                Ok(match &inline.z_star {
                    Some(z) => p.with_solution(z.clone()),
                    None => p,
                })
            }
        }
    }

    /// Inline form of an existing instance (registry export).
    pub fn describe(p: &ProblemInstance) -> Result<ProblemDescriptor> {
        Ok(ProblemDescriptor::Inline(Box::new(InlineProblem {
            phi: FunctionDescriptor::describe(&p.phi),
            psi: PenaltyDescriptor::describe(&p.psi)?,
            gamma: p.gamma,
            schedule: ScheduleDescriptor::describe(&p.schedule)?,
            u0: p.u0.clone(),
            v0: p.v0.clone(),
            z_star: p.analytic_solution.clone(),
        })))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist2_halfspace_example_parses() {
        let json = r#"{"kind":"dist2","set":{"kind":"halfspace","normal":[1.0,1.0],"offset":1.0}}"#;
        let d: FunctionDescriptor = serde_json::from_str(json).unwrap();
        let f = d.build().unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(f.eval(&[2.0, 2.0]).unwrap() > 0.0);
    }

    #[test]
    fn schedule_descriptor_exact_forms() {
        let p: ScheduleDescriptor = serde_json::from_str(r#"{"family":"power","alpha":2.0}"#).unwrap();
        assert_eq!(p.build().unwrap().beta(1.0), 4.0);
        let e: ScheduleDescriptor =
            serde_json::from_str(r#"{"family":"exp","beta0":1.0,"k":0.5}"#).unwrap();
        assert_eq!(e.build().unwrap().beta(0.0), 1.0);
        let c: ScheduleDescriptor = serde_json::from_str(r#"{"family":"const","beta0":5.0}"#).unwrap();
        assert_eq!(c.build().unwrap().beta(9.0), 5.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = r#"{"family":"power","alpha":2.0,"alhpa":3.0}"#;
        assert!(serde_json::from_str::<ScheduleDescriptor>(bad).is_err());
        let bad_fn = r#"{"kind":"zero","dim":2,"extra":1}"#;
        assert!(serde_json::from_str::<FunctionDescriptor>(bad_fn).is_err());
    }

    #[test]
    fn named_problem_builds_from_registry() {
        let d: ProblemDescriptor = serde_json::from_str(r#""affine-quadratic-2d""#).unwrap();
        let p = d.build().unwrap();
        assert_eq!(p.analytic_solution.as_deref(), Some(&[2.0, 0.0][..]));
        assert!(matches!(
            ProblemDescriptor::Named("nope".into()).build(),
            Err(CoreError::UnknownProblem(_))
        ));
    }

    #[test]
    fn inline_problem_round_trips() {
        let json = r#"{
            "phi": {"kind":"shifted_norm","center":[2.0,1.0]},
            "psi": {"kind":"dist2","set":{"kind":"hyperplane","normal":[0.0,1.0],"offset":0.0}},
            "gamma": 3.0,
            "schedule": {"family":"power","alpha":2.0},
            "u0": [0.0,0.0],
            "v0": [0.0,0.0]
        }"#;
        let d: ProblemDescriptor = serde_json::from_str(json).unwrap();
        let p = d.build().unwrap();
        let re = ProblemDescriptor::describe(&p).unwrap();
        let p2 = re.build().unwrap();
        assert_eq!(p2.gamma, p.gamma);
        assert_eq!(p2.u0, p.u0);
        assert_eq!(
            p2.phi.eval(&[1.0, 1.0]).unwrap(),
            p.phi.eval(&[1.0, 1.0]).unwrap()
        );
    }

    #[test]
    fn registry_problems_all_serialize() {
        for bp in crate::problems::registry() {
            let d = ProblemDescriptor::describe(&bp.instance)
                .unwrap_or_else(|e| panic!("{}: {e}", bp.name));
            let text = serde_json::to_string(&d).unwrap();
            let back: ProblemDescriptor = serde_json::from_str(&text).unwrap();
            back.build().unwrap();
        }
    }
}
