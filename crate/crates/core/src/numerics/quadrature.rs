//! Quadrature on `(0, ∞)` and on `[a, b]` against `1/√((b-x)(x-a))`.
//!
//! Half-line integrals use the exponential double-exponential map
//! `x = exp(u - e^{-u})`, which turns both exponential decay at infinity and
//! integrable algebraic singularities at the origin into double-exponential
//! decay in `u`. The finite kernel is removed by `x = c + r sin θ`, leaving a
//! smooth periodic integrand that the equispaced trapezoidal rule integrates
//! with geometric convergence.
//!
//! Integrands already decaying double-exponentially on the whole line (the
//! moment integrands after `x = √t e^y`) skip the map and use the plain
//! trapezoidal rule in `y`.
//!
//! Every engine halves the step on each level and stops once two consecutive
//! levels agree to the requested relative tolerance. The line rule also stops
//! one level early when the level differences show the error squaring per
//! level and the extrapolated error is already below tolerance.

use alloc::vec::Vec;

use super::{EndpointPair, NumericsError, PrecisionContext};
use crate::real::{Arith, Real};

pub const MAX_HALFLINE_LEVEL: usize = 10;
pub const MAX_SQRT_WEIGHT_LEVEL: usize = 16;
pub const MAX_LINE_LEVEL: usize = 14;

const HALFLINE_MIN_LEVEL: usize = 2;
const SQRT_WEIGHT_MIN_LEVEL: usize = 2;
const SQRT_WEIGHT_BASE_PANELS: usize = 8;
// walk outward at least this far in u before truncating
const MIN_REACH: i64 = 6;
// hard bounds on the u window, in units of the level-0 step
const MAX_REACH_RIGHT: i64 = 80;
const MAX_REACH_LEFT: i64 = 48;
const MAX_LINE_REACH: i64 = 8000;
// minimum per-level gain, as a ratio of log errors, for early acceptance
const QUADRATIC_RATIO: f64 = 1.6;

/// Abscissa of the half-line rule, with `ln x` available exactly from the map.
#[derive(Clone, Debug)]
pub struct HalfLineNode {
    pub x: Real,
    pub ln_x: Real,
}

/// Abscissa of the line rule with `e^y` supplied.
#[derive(Clone, Debug)]
pub struct LineNode {
    pub y: Real,
    pub exp_y: Real,
}

/// Converged quadrature value with its refinement history.
#[derive(Clone, Debug)]
pub struct QuadratureReport {
    pub value: Real,
    /// `log2` of the relative change between level `k` and `k-1`, for `k >= 1`.
    pub level_error_log2: Vec<f64>,
    pub evaluations: usize,
    /// Extrapolated error when the rule stopped early.
    pub predicted_error_log2: Option<f64>,
}

impl QuadratureReport {
    /// `log2` of the reported relative error bound.
    pub fn error_log2(&self) -> f64 {
        self.predicted_error_log2.unwrap_or_else(|| {
            self.level_error_log2
                .last()
                .copied()
                .unwrap_or(f64::INFINITY)
        })
    }
}

fn rel_change_log2(new: &Real, old: &Real) -> f64 {
    let d = new - old;
    if d.is_zero() {
        return f64::NEG_INFINITY;
    }
    if new.is_zero() {
        return d.log2_abs();
    }
    d.log2_abs() - new.log2_abs()
}

/// `∫_0^∞ f(x) dx` for `f` decaying at least exponentially at infinity and
/// integrable at the origin.
pub fn integrate_halfline<F>(mut f: F, ctx: &PrecisionContext) -> Result<QuadratureReport, NumericsError>
where
    F: FnMut(&HalfLineNode, &mut Arith) -> Real,
{
    let mut ar = Arith::new(ctx.bits());
    let tol_log2 = -(ctx.quad_tolerance_exponent() as f64);
    let negligible_log2 = tol_log2 - 12.0;

    // term(u) = f(x(u)) * dx/du
    let mut term = |u: &Real, ar: &mut Arith| -> Result<Real, NumericsError> {
        let emu = ar.exp(&-u);
        let ln_x = u - &emu;
        let x = ar.exp(&ln_x);
        let jac = &x * &(emu + 1.0);
        let node = HalfLineNode { x, ln_x };
        let v = f(&node, ar);
        if !v.is_finite() {
            return Err(NumericsError::NonFiniteIntegrand { x: node.x.to_f64() });
        }
        Ok(v * jac)
    };

    // level 0: h = 1/2, walk outward until terms are negligible and shrinking
    let h0 = 0.5f64;
    let mut evaluations = 0usize;
    let mut sum = term(&ar.zero(), &mut ar)?;
    evaluations += 1;
    let mut max_log2 = sum.log2_abs();
    let mut reach = [0i64; 2];
    for (side, dir) in [1i64, -1].into_iter().enumerate() {
        let limit = if dir > 0 { MAX_REACH_RIGHT } else { MAX_REACH_LEFT };
        let mut prev_log2 = sum.log2_abs();
        let mut quiet = 0;
        let mut j = 0i64;
        while j < limit {
            j += 1;
            let u = ar.num(dir as f64 * j as f64 * h0);
            let t = term(&u, &mut ar)?;
            evaluations += 1;
            let tl = t.log2_abs();
            sum += &t;
            if tl > max_log2 {
                max_log2 = tl;
            }
            let shrinking = tl <= prev_log2;
            prev_log2 = tl;
            if j >= MIN_REACH && shrinking && tl < max_log2 + negligible_log2 {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        if quiet < 3 {
            return Err(NumericsError::SlowDecay { u: dir as f64 * j as f64 * h0 });
        }
        // one unit of u as margin for the finer levels
        reach[side] = j + 2;
    }
    let (right, left) = (reach[0] as f64 * h0, reach[1] as f64 * h0);
    // the margin nodes belong to level 0 as well
    for j in 1..=2i64 {
        for (dir, base) in [(1.0, reach[0] - 2), (-1.0, reach[1] - 2)] {
            let u = ar.num(dir * (base + j) as f64 * h0);
            sum += term(&u, &mut ar)?;
            evaluations += 1;
        }
    }

    let mut h = ar.num(h0);
    let mut estimate = &sum * &h;
    let mut history = Vec::new();
    for level in 1..=MAX_HALFLINE_LEVEL {
        h = h.ldexp(-1);
        let step = h.to_f64();
        // odd multiples of the new step inside [-left, right]
        let mut k = 1i64;
        loop {
            let u_abs = k as f64 * step;
            if u_abs > right && u_abs > left {
                break;
            }
            if u_abs <= right {
                let u = &h * (k as f64);
                sum += term(&u, &mut ar)?;
                evaluations += 1;
            }
            if u_abs <= left {
                let u = -(&h * (k as f64));
                sum += term(&u, &mut ar)?;
                evaluations += 1;
            }
            k += 2;
        }
        let next = &sum * &h;
        let change = rel_change_log2(&next, &estimate);
        history.push(change);
        estimate = next;
        if level >= HALFLINE_MIN_LEVEL && change <= tol_log2 {
            return Ok(QuadratureReport {
                value: estimate,
                level_error_log2: history,
                evaluations,
                predicted_error_log2: None,
            });
        }
    }
    let n = history.len();
    Err(NumericsError::QuadratureNotConverged {
        levels: MAX_HALFLINE_LEVEL,
        last: libm::exp2(history[n - 1]),
        previous: libm::exp2(history[n.saturating_sub(2)]),
    })
}

/// `∫_ℝ f(y) dy` for `f` analytic in a strip around the real axis and
/// decaying at least exponentially in both directions. `center` should be
/// near the peak of `|f|`.
pub fn integrate_line<F>(mut f: F, center: f64, ctx: &PrecisionContext) -> Result<QuadratureReport, NumericsError>
where
    F: FnMut(&LineNode, &mut Arith) -> Real,
{
    let bits = ctx.bits();
    let mut ar = Arith::new(bits);
    let tol_log2 = -(ctx.quad_tolerance_exponent() as f64);
    let negligible_log2 = tol_log2 - 12.0;
    let mut evaluations = 0usize;
    let mut eval = |node: &LineNode, ar: &mut Arith| -> Result<Real, NumericsError> {
        let v = f(node, ar);
        if !v.is_finite() {
            return Err(NumericsError::NonFiniteIntegrand { x: node.y.to_f64() });
        }
        Ok(v)
    };

    let h0 = 0.5f64;
    let c = ar.num(libm::round(center * 2.0) / 2.0);
    let exp_c = ar.exp(&c);
    let mut sum = eval(&LineNode { y: c.clone(), exp_y: exp_c.clone() }, &mut ar)?;
    evaluations += 1;
    let mut max_log2 = sum.log2_abs();
    let mut reach = [0i64; 2];
    for (side, dir) in [1.0f64, -1.0].into_iter().enumerate() {
        let ratio = ar.exp(&ar.num(dir * h0));
        let mut e = exp_c.clone();
        let mut prev_log2 = sum.log2_abs();
        let mut quiet = 0;
        let mut j = 0i64;
        while j < MAX_LINE_REACH {
            j += 1;
            e = &e * &ratio;
            let y = &c + dir * j as f64 * h0;
            let t = eval(&LineNode { y, exp_y: e.clone() }, &mut ar)?;
            evaluations += 1;
            let tl = t.log2_abs();
            sum += &t;
            max_log2 = max_log2.max(tl);
            let shrinking = tl <= prev_log2;
            prev_log2 = tl;
            if j >= MIN_REACH && shrinking && tl < max_log2 + negligible_log2 {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        if quiet < 3 {
            return Err(NumericsError::SlowDecay { u: center + dir * j as f64 * h0 });
        }
        reach[side] = j;
    }

    let mut h = ar.num(h0);
    let mut estimate = &sum * &h;
    let mut history: Vec<f64> = Vec::new();
    for level in 1..=MAX_LINE_LEVEL {
        h = h.ldexp(-1);
        // new nodes c + (2k+1)h for k in [-2^level reach_left, 2^level reach_right)
        let per = 1i64 << level;
        let (k_lo, k_hi) = (-per / 2 * reach[1], per / 2 * reach[0]);
        let start = &c + &(&h * (2 * k_lo + 1) as f64);
        let mut e = ar.exp(&start);
        let ratio = ar.exp(&h.ldexp(1));
        for k in k_lo..k_hi {
            let y = &c + &(&h * (2 * k + 1) as f64);
            sum += eval(&LineNode { y, exp_y: e.clone() }, &mut ar)?;
            evaluations += 1;
            e = &e * &ratio;
        }
        let next = &sum * &h;
        let change = rel_change_log2(&next, &estimate);
        estimate = next;
        let predicted = history.last().and_then(|&prev| {
            let r = change / prev;
            (prev < -8.0 && r >= QUADRATIC_RATIO).then(|| r.min(2.0) * change)
        });
        history.push(change);
        let done = change <= tol_log2;
        let early = predicted.filter(|&p| p <= tol_log2 - 8.0);
        if level >= HALFLINE_MIN_LEVEL && (done || early.is_some()) {
            return Ok(QuadratureReport {
                value: estimate,
                level_error_log2: history,
                evaluations,
                predicted_error_log2: if done { None } else { early },
            });
        }
    }
    let n = history.len();
    Err(NumericsError::QuadratureNotConverged {
        levels: MAX_LINE_LEVEL,
        last: libm::exp2(history[n - 1]),
        previous: libm::exp2(history[n.saturating_sub(2)]),
    })
}

/// `∫_a^b g(x) / √((b-x)(x-a)) dx` via `x = (a+b)/2 + ((b-a)/2) sin θ`.
pub fn integrate_finite_sqrt_weight<G>(
    mut g: G,
    endpoints: &EndpointPair,
    ctx: &PrecisionContext,
) -> Result<QuadratureReport, NumericsError>
where
    G: FnMut(&Real, &mut Arith) -> Real,
{
    let mut ar = Arith::new(ctx.bits());
    let tol_log2 = -(ctx.quad_tolerance_exponent() as f64);
    let a = ar.num(endpoints.a());
    let b = ar.num(endpoints.b());
    let center = (&a + &b).ldexp(-1);
    let radius = (&b - &a).ldexp(-1);
    let pi = ar.pi();
    let half_pi = pi.ldexp(-1);

    let mut eval = |theta: &Real, ar: &mut Arith| -> Result<Real, NumericsError> {
        let x = &center + &(&radius * &ar.sin(theta));
        let v = g(&x, ar);
        if !v.is_finite() {
            return Err(NumericsError::NonFiniteIntegrand { x: x.to_f64() });
        }
        Ok(v)
    };

    // trapezoid on [-π/2, π/2] with panels M: endpoints carry half weight
    let mut panels = SQRT_WEIGHT_BASE_PANELS;
    let mut sum = (eval(&-&half_pi, &mut ar)? + eval(&half_pi, &mut ar)?).ldexp(-1);
    let mut evaluations = 2;
    for j in 1..panels {
        let theta = &(&pi * (j as f64 / panels as f64)) - &half_pi;
        sum += eval(&theta, &mut ar)?;
        evaluations += 1;
    }
    let mut estimate = &sum * &(&pi / (panels as f64));
    let mut history = Vec::new();
    for level in 1..=MAX_SQRT_WEIGHT_LEVEL {
        panels *= 2;
        let step = &pi / (panels as f64);
        for j in (1..panels).step_by(2) {
            let theta = &(&step * (j as f64)) - &half_pi;
            sum += eval(&theta, &mut ar)?;
            evaluations += 1;
        }
        let next = &sum * &step;
        let change = rel_change_log2(&next, &estimate);
        history.push(change);
        estimate = next;
        if level >= SQRT_WEIGHT_MIN_LEVEL && change <= tol_log2 {
            return Ok(QuadratureReport {
                value: estimate,
                level_error_log2: history,
                evaluations,
                predicted_error_log2: None,
            });
        }
    }
    let n = history.len();
    Err(NumericsError::QuadratureNotConverged {
        levels: MAX_SQRT_WEIGHT_LEVEL,
        last: libm::exp2(history[n - 1]),
        previous: libm::exp2(history[n.saturating_sub(2)]),
    })
}
