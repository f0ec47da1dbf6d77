//! Support `[a, b]` of the equilibrium density for `v(x) = x + t/x - α ln x`.
//!
//! The normalization and supplementary conditions reduce to
//!
//! ```text
//! (a+b)/2 - t/√(ab) - α          = 2N
//! 1 - t(a+b)/(2(ab)^{3/2}) - α/√(ab) = 0
//! ```
//!
//! which is solved by Newton's method in `(√a, √b)`.

use crate::moments::WeightParams;
use crate::numerics::{newton_solve_2d, EndpointPair, NewtonSystem, PrecisionContext};
use crate::real::{Arith, Real};

use super::AsymptoticsError;

/// Truncated large-`N` expansions of the endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointExpansion {
    pub a_n: f64,
    pub b_n: f64,
    /// Number of terms summed for `a_n`.
    pub order_used: u8,
    pub includes_quartic_a_term: bool,
}

/// `a_N`, `b_N` from their printed series in `s = 2N + α`; the quartic term
/// `5α³/(81 t^{1/3} s^{4/3})` is added to `a_N` on request.
pub fn endpoint_expansion(p: &WeightParams, n: u64, include_quartic: bool) -> Result<EndpointExpansion, AsymptoticsError> {
    let (alpha, t) = (p.alpha(), p.t());
    let s = 2.0 * n as f64 + alpha;
    if !(s > 0.0) {
        return Err(AsymptoticsError::Domain("2N + alpha must be positive"));
    }
    if include_quartic && t == 0.0 {
        return Err(AsymptoticsError::Domain("quartic endpoint term needs t > 0"));
    }
    let t13 = libm::cbrt(t);
    let t23 = t13 * t13;
    let s13 = libm::cbrt(s);
    let s23 = s13 * s13;
    let mut a_n = t23 / (2.0 * s13) + alpha * t13 / (3.0 * s23) + alpha * alpha / (6.0 * s);
    if include_quartic {
        a_n += 5.0 * alpha * alpha * alpha / (81.0 * t13 * s * s13);
    }
    let b_n = 2.0 * s + 3.0 * t23 / (2.0 * s13) - alpha * t13 / s23 - alpha * alpha / (6.0 * s);
    Ok(EndpointExpansion {
        a_n,
        b_n,
        order_used: if include_quartic { 4 } else { 3 },
        includes_quartic_a_term: include_quartic,
    })
}

/// Residuals of the two endpoint conditions at `(a, b)`; the first is
/// divided by `2N + α`.
pub fn endpoint_residuals(p: &WeightParams, n: u64, a: f64, b: f64) -> [f64; 2] {
    let (alpha, t) = (p.alpha(), p.t());
    let s = 2.0 * n as f64 + alpha;
    let r = libm::sqrt(a * b);
    [
        ((a + b) / 2.0 - t / r - alpha - 2.0 * n as f64) / s,
        1.0 - t * (a + b) / (2.0 * r * r * r) - alpha / r,
    ]
}

struct EndpointSystem {
    alpha: f64,
    t: f64,
    n: f64,
    scale: f64,
}

impl NewtonSystem for EndpointSystem {
    fn residual(&self, p: &Real, q: &Real, _: &mut Arith) -> [Real; 2] {
        let s = &p.square() + &q.square();
        let pq = p * q;
        let f1 = &(&(&s.ldexp(-1) - &(pq.recip() * self.t)) - self.alpha) - 2.0 * self.n;
        let f2 = &(&(-(&(&s * self.t) / &pq.powi(3).ldexp(1))) + 1.0) - &(pq.recip() * self.alpha);
        [&f1 / self.scale, f2]
    }

    fn jacobian(&self, p: &Real, q: &Real, _: &mut Arith) -> [[Real; 2]; 2] {
        let t = self.t;
        let s = &p.square() + &q.square();
        let pq = p * q;
        let pq2 = pq.square();
        let pq3 = &pq2 * &pq;
        let pq4 = pq2.square();
        let d1p = &(p + &(&(&p.square() * q).recip() * t)) / self.scale;
        let d1q = &(q + &(&(&q.square() * p).recip() * t)) / self.scale;
        // ∂F2/∂p = -tp/P³ + 3tSq/(2P⁴) + αq/P²
        let common = &(&s * (1.5 * t)) / &pq4;
        let d2p = &(&(-(&(p * t) / &pq3)) + &(&common * q)) + &(&(q * self.alpha) / &pq2);
        let d2q = &(&(-(&(q * t) / &pq3)) + &(&common * p)) + &(&(p * self.alpha) / &pq2);
        [[d1p, d1q], [d2p, d2q]]
    }
}

/// Exact endpoints with their multiprecision values.
#[derive(Clone, Debug)]
pub struct EndpointSolution {
    pub endpoints: EndpointPair,
    pub a: Real,
    pub b: Real,
    pub iterations: usize,
    pub residual_log2: f64,
}

/// Newton solve of the endpoint system from the expansion values.
pub fn solve_endpoints_exact(p: &WeightParams, n: u64, ctx: &PrecisionContext) -> Result<EndpointSolution, AsymptoticsError> {
    let (alpha, t) = (p.alpha(), p.t());
    if n == 0 {
        return Err(AsymptoticsError::Domain("N must be at least 1"));
    }
    if t == 0.0 && alpha == 0.0 {
        return Err(AsymptoticsError::HardEdge {
            b: 4.0 * n as f64 + 2.0 * alpha,
        });
    }
    if t == 0.0 && alpha < 0.0 {
        return Err(AsymptoticsError::Domain("t = 0 requires alpha > 0"));
    }
    let e = endpoint_expansion(p, n, false)?;
    let s = 2.0 * n as f64 + alpha;
    let a0 = if e.a_n > 0.0 {
        e.a_n
    } else {
        libm::fmax(libm::pow(t, 2.0 / 3.0) / (2.0 * libm::cbrt(s)), 1e-3)
    };
    let system = EndpointSystem {
        alpha,
        t,
        n: n as f64,
        scale: s,
    };
    let bits = ctx.bits();
    let start = (Real::from_f64(libm::sqrt(a0), bits), Real::from_f64(libm::sqrt(e.b_n), bits));
    let report = newton_solve_2d(&system, start, ctx)?;
    let a = report.x.square();
    let b = report.y.square();
    let endpoints = EndpointPair::new(a.to_f64(), b.to_f64())
        .map_err(|_| AsymptoticsError::Domain("Newton converged to an invalid support"))?;
    Ok(EndpointSolution {
        endpoints,
        a,
        b,
        iterations: report.iterations,
        residual_log2: report.residual_log2(),
    })
}

/// Endpoints at `t = 0`: the roots of `x² - (4N+2α)x + α²`, so that
/// `a ≈ α²/(2(2N+α))` for large `N`.
pub fn endpoints_t0_closed_form(alpha: f64, n: u64) -> (f64, f64) {
    let half_sum = 2.0 * n as f64 + alpha;
    let root = libm::sqrt(half_sum * half_sum - alpha * alpha);
    // a from the product to avoid cancellation
    let b = half_sum + root;
    (alpha * alpha / b, b)
}
