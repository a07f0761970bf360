//! Adaptive Simpson quadrature over a finite interval, aware of integrands
//! that take the value +∞ somewhere (the integral is then declared divergent
//! at that point rather than silently overflowing).

use crate::error::Result;
use crate::extended::ExtReal;

const MAX_DEPTH: u32 = 60;

#[derive(Clone, Debug, PartialEq)]
pub enum QuadratureOutcome {
    Value {
        value: f64,
        /// Accumulated Richardson error estimate.
        abs_error: f64,
        evaluations: usize,
    },
    /// The integrand evaluated to +∞ at `t`.
    InfiniteAt { t: f64 },
}

struct Ctx<'a, F> {
    f: &'a mut F,
    evals: usize,
    inf_at: Option<f64>,
}

impl<F> Ctx<'_, F>
where
    F: FnMut(f64) -> Result<ExtReal>,
{
    fn eval(&mut self, t: f64) -> Result<Option<f64>> {
        self.evals += 1;
        match (self.f)(t)? {
            ExtReal::Finite(v) => Ok(Some(v)),
            ExtReal::PosInf => {
                self.inf_at.get_or_insert(t);
                Ok(None)
            }
        }
    }
}

/// ∫ₐᵇ f(t) dt to the requested tolerances.
pub fn adaptive_simpson<F>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureOutcome>
where
    F: FnMut(f64) -> Result<ExtReal>,
{
    assert!(b > a, "integration interval must have positive length");
    let mut ctx = Ctx {
        f: &mut f,
        evals: 0,
        inf_at: None,
    };

    // coarse pass over 64 panels sets the tolerance scale
    let panels = 64usize;
    let width = (b - a) / panels as f64;
    let mut coarse = 0.0;
    let mut nodes = Vec::with_capacity(panels + 1);
    for i in 0..=panels {
        let t = a + width * i as f64;
        match ctx.eval(t)? {
            Some(v) => nodes.push(v),
            None => return Ok(QuadratureOutcome::InfiniteAt { t: ctx.inf_at.unwrap() }),
        }
    }
    for i in 0..panels {
        coarse += 0.5 * width * (nodes[i] + nodes[i + 1]);
    }
    let tol = abs_tol + rel_tol * coarse.abs();

    let mut total = 0.0;
    let mut err_total = 0.0;
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = lo + width;
        let mid = 0.5 * (lo + hi);
        let fm = match ctx.eval(mid)? {
            Some(v) => v,
            None => return Ok(QuadratureOutcome::InfiniteAt { t: ctx.inf_at.unwrap() }),
        };
        let whole = (hi - lo) / 6.0 * (nodes[i] + 4.0 * fm + nodes[i + 1]);
        match recurse(
            &mut ctx,
            lo,
            hi,
            nodes[i],
            fm,
            nodes[i + 1],
            whole,
            tol / panels as f64,
            MAX_DEPTH,
        )? {
            Some((v, e)) => {
                total += v;
                err_total += e;
            }
            None => return Ok(QuadratureOutcome::InfiniteAt { t: ctx.inf_at.unwrap() }),
        }
    }
    Ok(QuadratureOutcome::Value {
        value: total,
        abs_error: err_total,
        evaluations: ctx.evals,
    })
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    ctx: &mut Ctx<'_, F>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<Option<(f64, f64)>>
where
    F: FnMut(f64) -> Result<ExtReal>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = match ctx.eval(lm)? {
        Some(v) => v,
        None => return Ok(None),
    };
    let frm = match ctx.eval(rm)? {
        Some(v) => v,
        None => return Ok(None),
    };
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(Some((left + right + delta / 15.0, delta.abs() / 15.0)));
    }
    let l = recurse(ctx, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let r = recurse(ctx, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Ok(match (l, r) {
        (Some((lv, le)), Some((rv, re))) => Some((lv + rv, le + re)),
        _ => None,
    })
}
