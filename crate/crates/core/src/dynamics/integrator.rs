//! Explicit Runge-Kutta integration on a flat f64 state.
//!
//! Two methods: an embedded Dormand-Prince 4(5) pair with step control and
//! FSAL, and classical fixed-step RK4 (kept for order studies). Output is a
//! uniform sample grid filled by cubic Hermite interpolation between accepted
//! steps, which matches the order of the requested diagnostics.

use crate::error::Result;

// Dormand-Prince tableau. The last A row doubles as the 5th-order weights
// (FSAL: k7 = f(t+h, y_new) is k1 of the next step).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const SHRINK_LIMIT: f64 = 0.2;
const GROW_LIMIT: f64 = 5.0;
const MAX_STEPS: usize = 10_000_000;

/// Why a run stopped before reaching the end time.
#[derive(Clone, Debug, PartialEq)]
pub enum Abort {
    /// Accepted step underflowed 1e-12·T_end: explicit integration has hit
    /// a stiffness wall.
    StepUnderflow { t: f64, h: f64 },
    /// State or derivative stopped being finite.
    NonFinite { t: f64 },
    /// Step budget exhausted (behaves like stiffness at desk scale).
    StepBudget { t: f64 },
}

impl std::fmt::Display for Abort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Abort::StepUnderflow { t, h } => {
                write!(f, "step size underflow (h={h:.3e} at t={t:.6}): system too stiff for the explicit method")
            }
            Abort::NonFinite { t } => write!(f, "non-finite state or derivative at t={t:.6}"),
            Abort::StepBudget { t } => write!(f, "step budget exhausted at t={t:.6}"),
        }
    }
}

/// Counters and the abort marker for a finished (or aborted) run.
#[derive(Clone, Debug, Default)]
pub struct RunStats {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evaluations: usize,
    /// Largest accepted weighted error-norm estimate (≤ 1 by construction).
    pub max_error_estimate: f64,
    pub abort: Option<Abort>,
}

/// One accepted output row: time and flat state.
pub type GridPoint = (f64, Vec<f64>);

pub struct GridSampler {
    times: Vec<f64>,
    next: usize,
    pub points: Vec<GridPoint>,
}

impl GridSampler {
    pub fn uniform(t_end: f64, count: usize) -> Self {
        let count = count.max(2);
        let times = (0..count)
            .map(|i| t_end * i as f64 / (count - 1) as f64)
            .collect();
        GridSampler {
            times,
            next: 0,
            points: Vec::with_capacity(count),
        }
    }

    fn push_exact(&mut self, t: f64, y: &[f64]) {
        self.points.push((t, y.to_vec()));
        self.next += 1;
    }

    /// Fill every grid time in (t0, t1] by cubic Hermite interpolation.
    fn fill(&mut self, t0: f64, y0: &[f64], f0: &[f64], t1: f64, y1: &[f64], f1: &[f64]) {
        let h = t1 - t0;
        while self.next < self.times.len() {
            let ts = self.times[self.next];
            if ts > t1 + 1e-12 * t1.abs().max(1.0) {
                break;
            }
            let theta = ((ts - t0) / h).clamp(0.0, 1.0);
            let t2 = theta * theta;
            let t3 = t2 * theta;
            let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
            let h10 = t3 - 2.0 * t2 + theta;
            let h01 = -2.0 * t3 + 3.0 * t2;
            let h11 = t3 - t2;
            let y: Vec<f64> = (0..y0.len())
                .map(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
                .collect();
            self.points.push((ts, y));
            self.next += 1;
        }
    }
}

/// Embedded Dormand-Prince 4(5) with FSAL and step-size control.
///
/// `rhs(t, y, dy)` fills the derivative. The run integrates [0, t_end],
/// records `sampler` rows, and returns stats; on abort the sampler holds the
/// partial grid filled so far.
#[allow(clippy::too_many_arguments)]
pub fn dopri45<F>(
    mut rhs: F,
    y0: &[f64],
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
    h_init: f64,
    h_max: f64,
    sampler: &mut GridSampler,
) -> Result<RunStats>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y0.len();
    let mut stats = RunStats::default();
    let mut t = 0.0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; n]).collect();
    let mut y_stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    sampler.push_exact(0.0, &y);

    rhs(t, &y, &mut k[0])?;
    stats.rhs_evaluations += 1;
    if !crate::vecmath::all_finite(&k[0]) {
        stats.abort = Some(Abort::NonFinite { t });
        return Ok(stats);
    }

    let h_floor = 1e-12 * t_end;
    let mut h = h_init.min(h_max).min(t_end).max(h_floor);
    let mut just_rejected = false;

    // stop margin absorbs roundoff in t += h so the last step lands on t_end
    while t < t_end * (1.0 - 1e-14) {
        if stats.steps_accepted + stats.steps_rejected >= MAX_STEPS {
            stats.abort = Some(Abort::StepBudget { t });
            return Ok(stats);
        }
        h = h.min(t_end - t);

        // stages 2..7 (k[0] comes from FSAL or init)
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                y_stage[i] = y[i] + h * acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            rhs(t + C[s] * h, &y_stage, &mut tail[0])?;
            stats.rhs_evaluations += 1;
        }
        // 5th-order solution is stage 7's argument (A[6] row = b)
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                let a = A[6][j];
                if a != 0.0 {
                    acc += a * kj[i];
                }
            }
            y_new[i] = y[i] + h * acc;
        }

        if !crate::vecmath::all_finite(&y_new) || !crate::vecmath::all_finite(&k[6]) {
            stats.abort = Some(Abort::NonFinite { t });
            return Ok(stats);
        }

        // weighted RMS of the embedded error
        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += E[j] * kj[i];
                }
            }
            e *= h;
            let scale = abs_tol + rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            let t_new = t + h;
            // k[6] = f(t+h, y_new): Hermite slopes at both ends are exact
            sampler.fill(t, &y, &k[0], t_new, &y_new, &k[6]);

            stats.steps_accepted += 1;
            stats.max_error_estimate = stats.max_error_estimate.max(err);

            k.swap(0, 6); // FSAL
            std::mem::swap(&mut y, &mut y_new);
            t = t_new;

            let mut factor = SAFETY * err.powf(-0.2);
            factor = factor.clamp(SHRINK_LIMIT, GROW_LIMIT);
            if just_rejected {
                factor = factor.min(1.0);
                just_rejected = false;
            }
            h = (h * factor).min(h_max);
        } else {
            stats.steps_rejected += 1;
            just_rejected = true;
            let factor = (SAFETY * err.powf(-0.2)).clamp(SHRINK_LIMIT, 1.0);
            h *= factor;
            if h < h_floor {
                stats.abort = Some(Abort::StepUnderflow { t, h });
                return Ok(stats);
            }
        }
    }

    Ok(stats)
}

/// Classical fixed-step RK4 over [0, t_end] with the same sampling contract.
pub fn rk4_fixed<F>(
    mut rhs: F,
    y0: &[f64],
    t_end: f64,
    step: f64,
    sampler: &mut GridSampler,
) -> Result<RunStats>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y0.len();
    let mut stats = RunStats::default();
    let mut t = 0.0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut y_stage = vec![0.0; n];
    let mut f_new = vec![0.0; n];

    sampler.push_exact(0.0, &y);

    while t < t_end * (1.0 - 1e-14) {
        let h = step.min(t_end - t);
        rhs(t, &y, &mut k1)?;
        for i in 0..n {
            y_stage[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs(t + 0.5 * h, &y_stage, &mut k2)?;
        for i in 0..n {
            y_stage[i] = y[i] + 0.5 * h * k2[i];
        }
        rhs(t + 0.5 * h, &y_stage, &mut k3)?;
        for i in 0..n {
            y_stage[i] = y[i] + h * k3[i];
        }
        rhs(t + h, &y_stage, &mut k4)?;
        stats.rhs_evaluations += 4;

        let y_old = y.clone();
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !crate::vecmath::all_finite(&y) {
            stats.abort = Some(Abort::NonFinite { t });
            return Ok(stats);
        }
        let t_new = t + h;
        rhs(t_new, &y, &mut f_new)?;
        stats.rhs_evaluations += 1;
        sampler.fill(t, &y_old, &k1, t_new, &y, &f_new);
        stats.steps_accepted += 1;
        t = t_new;
    }

    Ok(stats)
}
