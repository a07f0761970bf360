//! The smooth convex function library.
//!
//! Each variant carries an exact value, an exact gradient, a Lipschitz
//! upper bound for the gradient, a strong-convexity modulus (0 when merely
//! convex), an infimum when known, and — where a closed form exists — the
//! Fenchel conjugate. Conjugates with no registered closed form report
//! `ConjugateUnavailable`; callers may fall back to a sampled supremum,
//! which is only ever a lower bound and is labeled as such.

use crate::convex::sets::ConvexSet;
use crate::error::{CoreError, Result};
use crate::extended::ExtReal;
use crate::vecmath::{dot, norm, norm_sq, sub};

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
/// Cached inside quadratic functions for conjugate evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Cholesky {
    l: Vec<Vec<f64>>,
}

impl Cholesky {
    fn decompose(a: &[Vec<f64>]) -> Option<Self> {
        let n = a.len();
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[i][j];
                for k in 0..j {
                    sum -= l[i][k] * l[j][k];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return None;
                    }
                    l[i][j] = sum.sqrt();
                } else {
                    l[i][j] = sum / l[j][j];
                }
            }
        }
        Some(Cholesky { l })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum -= self.l[i][k] * y[k];
            }
            y[i] = sum / self.l[i][i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in (i + 1)..n {
                sum -= self.l[k][i] * x[k];
            }
            x[i] = sum / self.l[i][i];
        }
        x
    }
}

/// Smallest-eigenvalue estimate by inverse power iteration, shaved by 1%
/// so the reported strong-convexity modulus never overclaims.
fn min_eigenvalue_estimate(a: &[Vec<f64>], chol: &Cholesky) -> f64 {
    let n = a.len();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 0.1).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    for _ in 0..200 {
        let w = chol.solve(&v);
        let nw = norm(&w);
        if nw == 0.0 {
            break;
        }
        v = w.iter().map(|x| x / nw).collect();
    }
    let av: Vec<f64> = (0..n).map(|i| dot(&a[i], &v)).collect();
    let rayleigh = dot(&v, &av);
    0.99 * rayleigh.max(0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConvexFunction {
    /// ½⟨Ax, x⟩ − ⟨b, x⟩ with A symmetric positive semidefinite.
    Quadratic {
        matrix: Vec<Vec<f64>>,
        linear: Vec<f64>,
        chol: Option<Cholesky>,
        mu: f64,
        lower: Option<f64>,
    },
    /// ½‖x − center‖².
    ShiftedSquaredNorm { center: Vec<f64> },
    /// ½ dist²(x, set).
    SquaredDistance { set: ConvexSet },
    /// log Σᵢ exp(xᵢ).
    LogSumExp { dim: usize },
    /// Huber smoothing of max(0, ⟨normal,x⟩ − offset): quadratic on
    /// (0, delta], linear beyond. Vanishes exactly on the halfspace.
    HuberHinge {
        normal: Vec<f64>,
        offset: f64,
        delta: f64,
    },
    /// The zero function (heavy-ball regime penalty).
    Zero { dim: usize },
}

impl ConvexFunction {
    pub fn quadratic(matrix: Vec<Vec<f64>>, linear: Vec<f64>) -> Result<Self> {
        let n = linear.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(CoreError::InvalidConstruction(
                "quadratic matrix must be n x n matching the linear term".into(),
            ));
        }
        for i in 0..n {
            for j in 0..i {
                if (matrix[i][j] - matrix[j][i]).abs() > 1e-12 * (1.0 + matrix[i][j].abs()) {
                    return Err(CoreError::InvalidConstruction(
                        "quadratic matrix must be symmetric".into(),
                    ));
                }
            }
        }
        let chol = Cholesky::decompose(&matrix);
        let (mu, lower) = match &chol {
            Some(c) => {
                // minimizer A⁻¹ b, minimum value −½⟨b, A⁻¹b⟩
                let xstar = c.solve(&linear);
                (min_eigenvalue_estimate(&matrix, c), Some(-0.5 * dot(&linear, &xstar)))
            }
            None => {
                let lower = if norm(&linear) == 0.0 { Some(0.0) } else { None };
                (0.0, lower)
            }
        };
        Ok(ConvexFunction::Quadratic {
            matrix,
            linear,
            chol,
            mu,
            lower,
        })
    }

    pub fn shifted_squared_norm(center: Vec<f64>) -> Self {
        ConvexFunction::ShiftedSquaredNorm { center }
    }

    pub fn squared_distance(set: ConvexSet) -> Self {
        ConvexFunction::SquaredDistance { set }
    }

    pub fn log_sum_exp(dim: usize) -> Self {
        ConvexFunction::LogSumExp { dim }
    }

    pub fn huber_hinge(normal: Vec<f64>, offset: f64, delta: f64) -> Result<Self> {
        if norm(&normal) <= 0.0 {
            return Err(CoreError::InvalidConstruction(
                "huber hinge normal must be nonzero".into(),
            ));
        }
        if !(delta > 0.0) {
            return Err(CoreError::InvalidConstruction(format!(
                "huber smoothing width must be positive, got {delta}"
            )));
        }
        Ok(ConvexFunction::HuberHinge {
            normal,
            offset,
            delta,
        })
    }

    pub fn zero(dim: usize) -> Self {
        ConvexFunction::Zero { dim }
    }

    /// Record an externally derived infimum for a quadratic whose matrix is
    /// singular (the Cholesky route cannot produce one there). The value is
    /// trusted here and cross-checked by the sampled lower-bound invariant.
    pub fn with_known_lower_bound(mut self, bound: f64) -> Self {
        if let ConvexFunction::Quadratic { lower, .. } = &mut self {
            *lower = Some(bound);
        }
        self
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConvexFunction::Quadratic { .. } => "quadratic",
            ConvexFunction::ShiftedSquaredNorm { .. } => "shifted-squared-norm",
            ConvexFunction::SquaredDistance { .. } => "squared-distance",
            ConvexFunction::LogSumExp { .. } => "log-sum-exp",
            ConvexFunction::HuberHinge { .. } => "huber-hinge",
            ConvexFunction::Zero { .. } => "zero",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ConvexFunction::Quadratic { linear, .. } => linear.len(),
            ConvexFunction::ShiftedSquaredNorm { center } => center.len(),
            ConvexFunction::SquaredDistance { set } => set.dimension(),
            ConvexFunction::LogSumExp { dim } => *dim,
            ConvexFunction::HuberHinge { normal, .. } => normal.len(),
            ConvexFunction::Zero { dim } => *dim,
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

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match self {
            ConvexFunction::Quadratic { matrix, linear, .. } => {
                let ax: Vec<f64> = matrix.iter().map(|row| dot(row, x)).collect();
                0.5 * dot(&ax, x) - dot(linear, x)
            }
            ConvexFunction::ShiftedSquaredNorm { center } => 0.5 * norm_sq(&sub(x, center)),
            ConvexFunction::SquaredDistance { set } => {
                0.5 * norm_sq(&sub(x, &set.project(x)?))
            }
            ConvexFunction::LogSumExp { .. } => {
                let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                m + x.iter().map(|xi| (xi - m).exp()).sum::<f64>().ln()
            }
            ConvexFunction::HuberHinge {
                normal,
                offset,
                delta,
            } => {
                let s = dot(normal, x) - offset;
                if s <= 0.0 {
                    0.0
                } else if s <= *delta {
                    s * s / (2.0 * delta)
                } else {
                    s - delta / 2.0
                }
            }
            ConvexFunction::Zero { .. } => 0.0,
        })
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(match self {
            ConvexFunction::Quadratic { matrix, linear, .. } => matrix
                .iter()
                .zip(linear)
                .map(|(row, b)| dot(row, x) - b)
                .collect(),
            ConvexFunction::ShiftedSquaredNorm { center } => sub(x, center),
            ConvexFunction::SquaredDistance { set } => sub(x, &set.project(x)?),
            ConvexFunction::LogSumExp { .. } => {
                let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let weights: Vec<f64> = x.iter().map(|xi| (xi - m).exp()).collect();
                let z: f64 = weights.iter().sum();
                weights.into_iter().map(|w| w / z).collect()
            }
            ConvexFunction::HuberHinge {
                normal,
                offset,
                delta,
            } => {
                let s = dot(normal, x) - offset;
                let slope = if s <= 0.0 {
                    0.0
                } else if s <= *delta {
                    s / delta
                } else {
                    1.0
                };
                normal.iter().map(|ni| slope * ni).collect()
            }
            ConvexFunction::Zero { dim } => vec![0.0; *dim],
        })
    }

    /// Upper bound L with ‖∇f(x) − ∇f(y)‖ ≤ L‖x − y‖.
    pub fn grad_lipschitz(&self) -> f64 {
        match self {
            // symmetric matrix: operator norm bounded by the max absolute row sum
            ConvexFunction::Quadratic { matrix, .. } => matrix
                .iter()
                .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            ConvexFunction::ShiftedSquaredNorm { .. } => 1.0,
            ConvexFunction::SquaredDistance { .. } => 1.0,
            ConvexFunction::LogSumExp { .. } => 1.0,
            ConvexFunction::HuberHinge { normal, delta, .. } => norm_sq(normal) / delta,
            ConvexFunction::Zero { .. } => 0.0,
        }
    }

    /// Strong-convexity modulus μ; 0 when merely convex.
    pub fn strong_convexity(&self) -> f64 {
        match self {
            ConvexFunction::Quadratic { mu, .. } => *mu,
            ConvexFunction::ShiftedSquaredNorm { .. } => 1.0,
            _ => 0.0,
        }
    }

    /// inf f, when known.
    pub fn lower_bound(&self) -> Option<f64> {
        match self {
            ConvexFunction::Quadratic { lower, .. } => *lower,
            ConvexFunction::ShiftedSquaredNorm { .. } => Some(0.0),
            ConvexFunction::SquaredDistance { .. } => Some(0.0),
            ConvexFunction::LogSumExp { .. } => None, // unbounded below
            ConvexFunction::HuberHinge { .. } => Some(0.0),
            ConvexFunction::Zero { .. } => Some(0.0),
        }
    }

    pub fn has_conjugate(&self) -> bool {
        match self {
            ConvexFunction::Quadratic { chol, .. } => chol.is_some(),
            ConvexFunction::HuberHinge { .. } => true,
            ConvexFunction::LogSumExp { .. } => true,
            ConvexFunction::ShiftedSquaredNorm { .. } => true,
            ConvexFunction::SquaredDistance { .. } => true,
            ConvexFunction::Zero { .. } => true,
        }
    }

    /// Fenchel conjugate f*(p) = sup_x ⟨p,x⟩ − f(x), closed form only.
    pub fn conjugate(&self, p: &[f64]) -> Result<ExtReal> {
        self.check_dim(p)?;
        match self {
            ConvexFunction::Quadratic { linear, chol, .. } => match chol {
                // f*(p) = ½⟨p + b, A⁻¹(p + b)⟩
                Some(c) => {
                    let rhs: Vec<f64> = p.iter().zip(linear).map(|(pi, bi)| pi + bi).collect();
                    let sol = c.solve(&rhs);
                    Ok(ExtReal::Finite(0.5 * dot(&rhs, &sol)))
                }
                None => Err(CoreError::ConjugateUnavailable {
                    function: "quadratic with singular matrix".into(),
                }),
            },
            // f*(p) = ½‖p‖² + ⟨p, a⟩
            ConvexFunction::ShiftedSquaredNorm { center } => {
                Ok(ExtReal::Finite(0.5 * norm_sq(p) + dot(p, center)))
            }
            // infimal convolution of ½‖·‖² with the indicator of the set:
            // (½dist²(·,C))* = σ_C + ½‖·‖²
            ConvexFunction::SquaredDistance { set } => {
                Ok(set.support(p)?.add_finite(0.5 * norm_sq(p)))
            }
            // negative entropy restricted to the probability simplex
            ConvexFunction::LogSumExp { .. } => {
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > 1e-9 || p.iter().any(|&pi| pi < -1e-12) {
                    return Ok(ExtReal::PosInf);
                }
                let entropy: f64 = p
                    .iter()
                    .map(|&pi| if pi > 0.0 { pi * pi.ln() } else { 0.0 })
                    .sum();
                Ok(ExtReal::Finite(entropy))
            }
            // f(x) = g(⟨u,x⟩ − b) with g the scalar Huber hinge:
            // f*(s·u) = s·b + δs²/2 on s ∈ [0,1], +∞ elsewhere
            ConvexFunction::HuberHinge {
                normal,
                offset,
                delta,
            } => {
                let pn = norm(p);
                let s = dot(p, normal) / norm_sq(normal);
                let residual: f64 = p
                    .iter()
                    .zip(normal)
                    .map(|(pi, ni)| (pi - s * ni) * (pi - s * ni))
                    .sum::<f64>()
                    .sqrt();
                if residual > 1e-9 * pn.max(1e-300) || !(-1e-12..=1.0 + 1e-12).contains(&s) {
                    return Ok(ExtReal::PosInf);
                }
                let s = s.clamp(0.0, 1.0);
                Ok(ExtReal::Finite(s * offset + delta * s * s / 2.0))
            }
            // 0* = indicator of {0}
            ConvexFunction::Zero { .. } => {
                if norm(p) == 0.0 {
                    Ok(ExtReal::Finite(0.0))
                } else {
                    Ok(ExtReal::PosInf)
                }
            }
        }
    }

    /// Sampled supremum of ⟨p,x⟩ − f(x) over `samples` points of
    /// [-radius, radius]ⁿ. This is a LOWER bound on the conjugate; it must
    /// never feed an integrability verdict and exists only as a reference
    /// check against the closed forms.
    pub fn conjugate_sampled_lower_bound(
        &self,
        p: &[f64],
        radius: f64,
        samples: usize,
        seed: u64,
    ) -> Result<f64> {
        use rand::{Rng, SeedableRng};
        self.check_dim(p)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = self.dimension();
        let mut best = f64::NEG_INFINITY;
        for _ in 0..samples {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..radius)).collect();
            best = best.max(dot(p, &x) - self.eval(&x)?);
        }
        Ok(best)
    }
}

/// Max relative error between a claimed gradient and the central finite
/// difference of `value` with step `h`, coordinate-wise against the overall
/// gradient scale. Exposed separately so negative-control fixtures can feed
/// in a deliberately wrong gradient.
pub fn fd_check_raw<F>(value: F, claimed_grad: &[f64], x: &[f64], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if !(h > 0.0) {
        return Err(CoreError::InvalidDiagnosticInput(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    if claimed_grad.len() != x.len() {
        return Err(CoreError::DimensionMismatch {
            expected: x.len(),
            got: claimed_grad.len(),
        });
    }
    let mut fd = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let fp = value(&xp)?;
        xp[i] = x[i] - h;
        let fm = value(&xp)?;
        xp[i] = x[i];
        fd[i] = (fp - fm) / (2.0 * h);
    }
    let scale = claimed_grad
        .iter()
        .chain(fd.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-12);
    Ok(claimed_grad
        .iter()
        .zip(&fd)
        .map(|(gi, di)| (gi - di).abs() / scale)
        .fold(0.0, f64::max))
}

/// Max relative error between the exact gradient and a central finite
/// difference with step `h`.
pub fn fd_gradient_check(f: &ConvexFunction, x: &[f64], h: f64) -> Result<f64> {
    let g = f.grad(x)?;
    fd_check_raw(|y| f.eval(y), &g, x, h)
}
