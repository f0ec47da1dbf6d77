//! Moments `μ_k = ∫_0^∞ x^{k+α} e^{-x-t/x} dx` of the perturbed Laguerre
//! weight.
//!
//! For `t > 0`, `μ_k = 2 t^{(α+k+1)/2} K_{α+k+1}(2√t)`, and the Bessel
//! recurrence in the order becomes
//!
//! ```text
//! μ_{k+1} = (α + k + 1) μ_k + t μ_{k-1}
//! ```
//!
//! All terms are positive, so the forward recurrence is stable: the relative
//! error grows at most linearly in `k`. Only `μ_0` and `μ_1` are computed by
//! quadrature (with 64 guard bits); at `t = 0` the table is the gamma
//! sequence `μ_k = Γ(α+k+1)`.
//!
//! Quadrature uses `x = √t e^y`, under which
//! `μ_k = t^{ν/2} ∫_ℝ exp(νy - 2√t cosh y) dy` with `ν = α+k+1`, an integrand
//! with double-exponential decay in both directions. Non-integer gamma
//! values use `Γ(ν) = ∫_ℝ exp(νy - e^y) dy` after shifting `ν` upward.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::numerics::{integrate_halfline, integrate_line, HalfLineNode, LineNode, NumericsError, PrecisionContext};
use crate::real::{Arith, Real};

/// Extra mantissa bits carried by quadrature seeds.
pub const SEED_GUARD_BITS: usize = 64;
/// Below this α quadrature near the origin converges slowly; tables are flagged.
pub const SLOW_ALPHA_THRESHOLD: f64 = -0.95;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error("invalid weight parameters alpha={alpha}, t={t} (need alpha > -1, t >= 0)")]
    InvalidParams { alpha: f64, t: f64 },
    #[error("weight evaluated at x <= 0")]
    NonPositiveAbscissa,
    #[error("no real saddle: (alpha+k)^2 - 4t = {discriminant} < 0")]
    SaddleAbsent { discriminant: f64 },
    #[error("moment table needs K >= 2, got {0}")]
    TooShort(usize),
    #[error("moment table invariant violated at k={index}: {what}")]
    Invariant { index: usize, what: &'static str },
    #[error("malformed moment value at index {0}")]
    Parse(usize),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Parameters `(α, t)` of `w(x) = x^α e^{-x-t/x}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightParams {
    alpha: f64,
    t: f64,
}

impl WeightParams {
    pub fn new(alpha: f64, t: f64) -> Result<Self, MomentError> {
        if !(alpha > -1.0 && alpha.is_finite() && t >= 0.0 && t.is_finite()) {
            return Err(MomentError::InvalidParams { alpha, t });
        }
        Ok(WeightParams { alpha, t })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// `x^α e^{-x-t/x}`; zero once `e^{-t/x}` leaves the exponent range.
pub fn weight_eval(x: &Real, p: &WeightParams, ar: &mut Arith) -> Result<Real, MomentError> {
    if !x.is_positive() {
        return Err(MomentError::NonPositiveAbscissa);
    }
    let ln_x = ar.ln(x);
    Ok(log_weighted_power(x, &ln_x, &alpha_plus(p.alpha, 0, x.bits()), p.t, ar))
}

// x^power e^{-x-t/x}, evaluated as one exponential
/// `α + k` without rounding the sum to a double.
fn alpha_plus(alpha: f64, k: usize, bits: usize) -> Real {
    &Real::from_f64(alpha, bits) + k as f64
}

fn log_weighted_power(x: &Real, ln_x: &Real, power: &Real, t: f64, ar: &mut Arith) -> Real {
    let mut e = &(ln_x * power) - x;
    if t != 0.0 {
        e -= &(x.recip() * t);
    }
    ar.exp(&e)
}

/// Laplace-method data for `∫ e^{-v(x)} dx`, `v(x) = x + t/x - (α+k) ln x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialDiagnostics {
    pub v: f64,
    pub dv: f64,
    pub d2v: f64,
    /// `x₀ = (α+k + √((α+k)² - 4t)) / 2`.
    pub saddle: f64,
    pub d2v_at_saddle: f64,
    /// `v′(x₀)`; zero only when `t = 0`.
    pub dv_at_saddle: f64,
    /// Positive root of `v′`, `(α+k + √((α+k)² + 4t)) / 2`.
    pub stationary_point: f64,
}

pub fn potential_derivatives(x: f64, p: &WeightParams, k: u32) -> Result<PotentialDiagnostics, MomentError> {
    if !(x > 0.0) {
        return Err(MomentError::NonPositiveAbscissa);
    }
    let (t, s) = (p.t, p.alpha + k as f64);
    let v = x + t / x - s * libm::log(x);
    let dv_at = |y: f64| 1.0 - t / (y * y) - s / y;
    let d2v_at = |y: f64| 2.0 * t / (y * y * y) + s / (y * y);
    let discriminant = s * s - 4.0 * t;
    if discriminant < 0.0 {
        return Err(MomentError::SaddleAbsent { discriminant });
    }
    let saddle = 0.5 * (s + libm::sqrt(discriminant));
    if !(saddle > 0.0) {
        return Err(MomentError::SaddleAbsent { discriminant });
    }
    let stationary_point = 0.5 * (s + libm::sqrt(s * s + 4.0 * t));
    debug_assert!(dv_at(stationary_point).abs() <= 1e-12 * (1.0 + s / stationary_point));
    Ok(PotentialDiagnostics {
        v,
        dv: dv_at(x),
        d2v: d2v_at(x),
        saddle,
        d2v_at_saddle: d2v_at(saddle),
        dv_at_saddle: dv_at(saddle),
        stationary_point,
    })
}

/// How the first moments of a table were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedMethod {
    /// `μ_0` and `μ_1` by double-exponential quadrature.
    Quadrature,
    /// `t = 0`: `μ_0 = Γ(α+1)` (exact for integer α, quadrature otherwise).
    Gamma,
    /// Loaded from a serialized table.
    Decimal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MomentFlags {
    /// α < -0.95: slow quadrature convergence near the origin.
    pub slow_alpha: bool,
    /// `0 < t < 2^{-bits/2}` was treated as `t = 0`.
    pub t_flushed: bool,
}

/// `μ_0 … μ_K` at `bits` of mantissa.
#[derive(Clone, Debug)]
pub struct MomentTable {
    params: WeightParams,
    values: Vec<Real>,
    bits: usize,
    seed: SeedMethod,
    flags: MomentFlags,
    /// `log2` of the estimated relative accuracy of the entries.
    accuracy_log2: f64,
}

/// Significant decimal digits for serialized entries: `⌈bits · 0.302⌉`,
/// raised where needed to `⌈B log₁₀ 2⌉ + 1` with `B` the mantissa width
/// rounded up to whole 64-bit words, so that every value round-trips.
pub fn decimal_digits(bits: usize) -> usize {
    let words = bits.div_ceil(64) * 64;
    (bits * 302).div_ceil(1000).max((words * 30103).div_ceil(100_000) + 1)
}

fn effective_t(p: &WeightParams, bits: usize) -> (f64, bool) {
    if p.t > 0.0 && libm::log2(p.t) < -(bits as f64) / 2.0 {
        (0.0, true)
    } else {
        (p.t, false)
    }
}

// shift Γ(ν) to Γ(ν+m) with ν+m at least this, so the left tail is short
const GAMMA_SHIFT_TARGET: f64 = 64.0;

/// `Γ(α+1)` and the `log2` of its estimated relative error.
fn gamma_seed(alpha: f64, ctx: &PrecisionContext) -> Result<(Real, f64), MomentError> {
    if alpha >= 0.0 && alpha == libm::floor(alpha) && alpha <= 4096.0 {
        let mut g = Real::one(ctx.bits());
        for j in 2..=(alpha as i64) {
            g = g * (j as f64);
        }
        return Ok((g, f64::NEG_INFINITY));
    }
    let m = libm::ceil(GAMMA_SHIFT_TARGET - alpha - 1.0).max(0.0) as usize;
    let shifted = alpha_plus(alpha, m + 1, ctx.bits());
    let r = integrate_line(
        |n: &LineNode, ar: &mut Arith| ar.exp(&(&(&n.y * &shifted) - &n.exp_y)),
        libm::log(shifted.to_f64()),
        ctx,
    )?;
    let err = r.error_log2();
    let mut g = r.value;
    for j in 1..=m {
        g = &g / &alpha_plus(alpha, j, ctx.bits());
    }
    Ok((g, err))
}

/// `∫_0^∞ x^{ν-1} e^{-x-t/x} dx` for `t > 0` and the `log2` of its estimated
/// relative error.
fn bessel_form(nu: &Real, t: f64, ctx: &PrecisionContext) -> Result<(Real, f64), MomentError> {
    let mut ar = Arith::new(ctx.bits());
    let tr = ar.num(t);
    let sqrt_t = tr.sqrt();
    let r = integrate_line(
        |n: &LineNode, ar: &mut Arith| {
            let cosh2 = &n.exp_y + &n.exp_y.recip();
            ar.exp(&(&(&n.y * nu) - &(&cosh2 * &sqrt_t)))
        },
        libm::asinh(nu.to_f64() / (2.0 * libm::sqrt(t))),
        ctx,
    )?;
    let half_log_t = &ar.ln(&tr) * &nu.ldexp(-1);
    let scale = ar.exp(&half_log_t);
    let err = r.error_log2();
    Ok((r.value * scale, err))
}

impl MomentTable {
    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    pub fn values(&self) -> &[Real] {
        &self.values
    }

    pub fn get(&self, k: usize) -> Option<&Real> {
        self.values.get(k)
    }

    /// Highest moment index `K`.
    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn seed_method(&self) -> SeedMethod {
        self.seed
    }

    pub fn flags(&self) -> MomentFlags {
        self.flags
    }

    pub fn accuracy_log2(&self) -> f64 {
        self.accuracy_log2
    }

    /// Continue the recurrence to `μ_{k_max}`.
    pub fn extend_to(&mut self, k_max: usize) {
        let (t, _) = effective_t(&self.params, self.bits);
        let wide = self.bits + SEED_GUARD_BITS;
        let mut prev = self.values[self.values.len() - 2].with_bits(wide);
        let mut cur = self.values[self.values.len() - 1].with_bits(wide);
        for k in self.max_index()..k_max {
            let next = &(&cur * &alpha_plus(self.params.alpha, k + 1, wide)) + &(&prev * t);
            self.values.push(next.with_bits(self.bits));
            prev = cur;
            cur = next;
        }
    }

    /// Copy with every entry rounded to `bits` (no-op above the table width).
    pub fn rounded(&self, bits: usize) -> MomentTable {
        if bits >= self.bits {
            return self.clone();
        }
        let mut t = self.clone();
        t.values = self.values.iter().map(|v| v.with_bits(bits)).collect();
        t.bits = bits;
        t.accuracy_log2 = t.accuracy_log2.max(-(bits as f64) + 1.0);
        t
    }

    /// Copy of the first `K + 1` entries.
    pub fn truncated(&self, k_max: usize) -> MomentTable {
        let mut t = self.clone();
        t.values.truncate(k_max + 1);
        t
    }

    /// Positivity, the three-term relation (to `2^{-bits/2}`) and strict
    /// log-convexity of every entry.
    pub fn check_invariants(&self) -> Result<(), MomentError> {
        let (t, _) = effective_t(&self.params, self.bits);
        let tol = -(self.bits as f64) / 2.0;
        for (k, v) in self.values.iter().enumerate() {
            if !v.is_positive() {
                return Err(MomentError::Invariant { index: k, what: "moment not positive" });
            }
        }
        for k in 1..self.max_index() {
            let (lo, mid, hi) = (&self.values[k - 1], &self.values[k], &self.values[k + 1]);
            let rhs = &(mid * &alpha_plus(self.params.alpha, k + 1, self.bits)) + &(lo * t);
            let d = (&rhs - hi).abs();
            if !d.is_zero() && d.log2_abs() - hi.log2_abs() > tol {
                return Err(MomentError::Invariant { index: k + 1, what: "three-term relation" });
            }
            if !(lo * hi > mid.square()) {
                return Err(MomentError::Invariant { index: k, what: "log-convexity" });
            }
        }
        Ok(())
    }

    /// Entries as decimal strings with [`decimal_digits`] significant digits.
    pub fn decimal_values(&self) -> Vec<String> {
        let mut ar = Arith::new(self.bits);
        let digits = decimal_digits(self.bits);
        self.values.iter().map(|v| ar.to_decimal(v, digits)).collect()
    }

    /// Rebuild a table from decimal strings (the serialized form).
    pub fn from_decimal<S: AsRef<str>>(
        params: WeightParams,
        bits: usize,
        values: &[S],
    ) -> Result<MomentTable, MomentError> {
        if values.len() < 3 {
            return Err(MomentError::TooShort(values.len().saturating_sub(1)));
        }
        let mut ar = Arith::new(bits);
        let parsed = values
            .iter()
            .enumerate()
            .map(|(i, s)| ar.parse_decimal(s.as_ref()).ok_or(MomentError::Parse(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let (_, t_flushed) = effective_t(&params, bits);
        let table = MomentTable {
            params,
            values: parsed,
            bits,
            seed: SeedMethod::Decimal,
            flags: MomentFlags {
                slow_alpha: params.alpha < SLOW_ALPHA_THRESHOLD,
                t_flushed,
            },
            accuracy_log2: -(bits as f64) * 0.99,
        };
        table.check_invariants()?;
        Ok(table)
    }
}

/// `μ_0 … μ_K` at `ctx.bits`.
pub fn compute_moment_table(p: &WeightParams, k_max: usize, ctx: &PrecisionContext) -> Result<MomentTable, MomentError> {
    if k_max < 2 {
        return Err(MomentError::TooShort(k_max));
    }
    let seed_ctx = ctx.widened(SEED_GUARD_BITS);
    let wide = seed_ctx.bits();
    let (t, t_flushed) = effective_t(p, ctx.bits());
    let alpha = p.alpha;

    let (mu0, mu1, seed, seed_err) = if t == 0.0 {
        let (g, err) = gamma_seed(alpha, &seed_ctx)?;
        let g1 = &g * &alpha_plus(alpha, 1, wide);
        (g, g1, SeedMethod::Gamma, err)
    } else {
        let (m0, e0) = bessel_form(&alpha_plus(alpha, 1, wide), t, &seed_ctx)?;
        let (m1, e1) = bessel_form(&alpha_plus(alpha, 2, wide), t, &seed_ctx)?;
        (m0, m1, SeedMethod::Quadrature, libm::fmax(e0, e1))
    };

    let mut values = Vec::with_capacity(k_max + 1);
    let (mut prev, mut cur) = (mu0.with_bits(wide), mu1.with_bits(wide));
    values.push(prev.with_bits(ctx.bits()));
    values.push(cur.with_bits(ctx.bits()));
    for k in 1..k_max {
        let next = &(&cur * &alpha_plus(alpha, k + 1, wide)) + &(&prev * t);
        values.push(next.with_bits(ctx.bits()));
        prev = cur;
        cur = next;
    }
    let rounding = -(ctx.bits() as f64) + 1.0;
    let growth = libm::log2((k_max + 1) as f64);
    Ok(MomentTable {
        params: *p,
        values,
        bits: ctx.bits(),
        seed,
        flags: MomentFlags {
            slow_alpha: alpha < SLOW_ALPHA_THRESHOLD,
            t_flushed,
        },
        accuracy_log2: rounding.max(seed_err + growth),
    })
}

/// `μ_k` by direct quadrature, independent of the recurrence.
pub fn spot_check_moment(p: &WeightParams, k: u32, ctx: &PrecisionContext) -> Result<Real, MomentError> {
    if p.t > 0.0 {
        return Ok(bessel_form(&alpha_plus(p.alpha, k as usize + 1, ctx.bits()), p.t, ctx)?.0);
    }
    let (t, power) = (p.t, alpha_plus(p.alpha, k as usize, ctx.bits()));
    let r = integrate_halfline(
        |n: &HalfLineNode, ar: &mut Arith| log_weighted_power(&n.x, &n.ln_x, &power, t, ar),
        ctx,
    )?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::rel_diff;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256, 200).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(WeightParams::new(-1.0, 0.0).is_err());
        assert!(WeightParams::new(-1.5, 1.0).is_err());
        assert!(WeightParams::new(0.0, -0.1).is_err());
        assert!(WeightParams::new(f64::NAN, 0.0).is_err());
        assert!(WeightParams::new(-0.99, 0.0).is_ok());
    }

    #[test]
    fn weight_examples() {
        let mut ar = Arith::new(256);
        let one = ar.one();
        let w = weight_eval(&one, &WeightParams::new(0.0, 0.0).unwrap(), &mut ar).unwrap();
        assert!(rel_diff(&w, &ar.exp(&ar.num(-1.0))) < 1e-70);
        let w = weight_eval(&one, &WeightParams::new(2.0, 1.0).unwrap(), &mut ar).unwrap();
        assert!(rel_diff(&w, &ar.exp(&ar.num(-2.0))) < 1e-70);
        // 2^{-1/2} e^{-2 - t/2} with t the double nearest 0.3
        let x = ar.num(2.0);
        let w = weight_eval(&x, &WeightParams::new(-0.5, 0.3).unwrap(), &mut ar).unwrap();
        let expect = &ar.exp(&(&(ar.num(0.3) / -2.0) - 2.0)) / &x.sqrt();
        assert!((w.to_f64() - 0.7071067811865476 * (-2.15f64).exp()).abs() < 1e-16);
        assert!(rel_diff(&w, &expect) < 1e-70);
        assert_eq!(
            weight_eval(&ar.zero(), &WeightParams::new(0.0, 0.0).unwrap(), &mut ar).unwrap_err(),
            MomentError::NonPositiveAbscissa
        );
    }

    #[test]
    fn weight_underflows_to_zero_near_origin() {
        let mut ar = Arith::new(128);
        let x = ar.parse_decimal("1e-12").unwrap();
        let w = weight_eval(&x, &WeightParams::new(0.0, 1.0).unwrap(), &mut ar).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn saddle_examples() {
        let d = potential_derivatives(5.0, &WeightParams::new(0.0, 0.0).unwrap(), 5).unwrap();
        assert_eq!(d.saddle, 5.0);
        assert!((d.d2v_at_saddle - 0.2).abs() < 1e-15);
        assert!(d.dv.abs() < 1e-15);
        let d = potential_derivatives(1.0, &WeightParams::new(1.0, 3.0).unwrap(), 3).unwrap();
        assert_eq!(d.saddle, 3.0);
        assert!((d.dv_at_saddle + 2.0 / 3.0).abs() < 1e-15);
        assert!((d.stationary_point - (2.0 + 7f64.sqrt())).abs() < 1e-14);
        let err = potential_derivatives(1.0, &WeightParams::new(0.0, 1.0).unwrap(), 0).unwrap_err();
        assert!(matches!(err, MomentError::SaddleAbsent { .. }));
    }

    #[test]
    fn laguerre_moments_are_factorials() {
        let t = compute_moment_table(&WeightParams::new(0.0, 0.0).unwrap(), 6, &ctx()).unwrap();
        let got: Vec<f64> = t.values().iter().map(Real::to_f64).collect();
        assert_eq!(got, [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0]);
        assert_eq!(t.seed_method(), SeedMethod::Gamma);
        t.check_invariants().unwrap();
    }

    #[test]
    fn half_integer_alpha_gives_gamma_values() {
        let c = ctx();
        let t = compute_moment_table(&WeightParams::new(0.5, 0.0).unwrap(), 3, &c).unwrap();
        let mut ar = Arith::new(256);
        let g15 = &ar.pi().sqrt() * 0.5;
        assert!(rel_diff(&t.values()[0], &g15) < 1e-60);
        assert!(rel_diff(&t.values()[1], &(&g15 * 1.5)) < 1e-60);
        assert!(rel_diff(&t.values()[2], &(&g15 * 3.75)) < 1e-60);
    }

    #[test]
    fn non_dyadic_alpha_keeps_full_width() {
        let c = ctx();
        for t in [0.0, 0.3] {
            let p = WeightParams::new(0.7, t).unwrap();
            let table = compute_moment_table(&p, 40, &c).unwrap();
            for k in [0, 1, 17, 40] {
                let direct = spot_check_moment(&p, k, &c).unwrap();
                assert!(rel_diff(&table.values()[k as usize], &direct) < 1e-55, "t={t} k={k}");
            }
        }
    }

    #[test]
    fn unit_t_seeds_match_bessel_values() {
        let c = ctx();
        let p = WeightParams::new(0.0, 1.0).unwrap();
        let t = compute_moment_table(&p, 2, &c).unwrap();
        let mut ar = Arith::new(256);
        let k1 = ar.parse_decimal("0.2797317636330448545691976140708220477745").unwrap();
        let k2 = ar.parse_decimal("0.5075195091321117258746367639357857137711").unwrap();
        assert!(rel_diff(&t.values()[0], &k1) < 1e-39);
        assert!(rel_diff(&t.values()[1], &k2) < 1e-39);
        let direct = spot_check_moment(&p, 2, &c).unwrap();
        assert!(rel_diff(&t.values()[2], &direct) < 1e-55);
        assert!(rel_diff(&t.values()[2], &(&(&k2 * 2.0) + &k1)) < 1e-39);
    }

    #[test]
    fn spot_check_examples() {
        let c = ctx();
        let f = spot_check_moment(&WeightParams::new(0.0, 0.0).unwrap(), 10, &c).unwrap();
        assert!(rel_diff(&f, &Real::from_f64(3_628_800.0, 256)) < 1e-58);
        let p = WeightParams::new(0.0, 1.0).unwrap();
        let table = compute_moment_table(&p, 7, &c).unwrap();
        let direct = spot_check_moment(&p, 7, &c).unwrap();
        assert!(rel_diff(&table.values()[7], &direct) < 1e-55);
        let s = spot_check_moment(&WeightParams::new(-0.9, 0.01).unwrap(), 0, &c).unwrap();
        assert!(s.is_positive() && s.to_f64().is_finite());
    }

    #[test]
    fn flags_and_flush() {
        let c = PrecisionContext::new(128, 100).unwrap();
        let t = compute_moment_table(&WeightParams::new(-0.97, 1e-30).unwrap(), 4, &c).unwrap();
        assert!(t.flags().slow_alpha);
        assert!(t.flags().t_flushed);
        assert_eq!(t.seed_method(), SeedMethod::Gamma);
    }

    #[test]
    fn large_index_ratio_approaches_gamma() {
        let c = ctx();
        let p = WeightParams::new(0.0, 1.0).unwrap();
        let table = compute_moment_table(&p, 200, &c).unwrap();
        let mut gamma = Real::one(256);
        for j in 2..=200 {
            gamma = gamma * (j as f64);
        }
        let ratio = (&table.values()[200] / &gamma).to_f64();
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
        let direct = spot_check_moment(&p, 200, &c).unwrap();
        assert!(rel_diff(&table.values()[200], &direct) < 1e-55);
    }

    #[test]
    fn too_short_table_is_rejected() {
        let err = compute_moment_table(&WeightParams::new(0.0, 1.0).unwrap(), 1, &ctx()).unwrap_err();
        assert_eq!(err, MomentError::TooShort(1));
    }

    #[test]
    fn digit_counts() {
        assert_eq!(decimal_digits(256), 79);
        assert_eq!(decimal_digits(100), 40);
        assert_eq!(decimal_digits(2048), 619);
    }

    #[test]
    fn decimal_roundtrip_and_extension() {
        let c = ctx();
        let p = WeightParams::new(0.5, 1.0).unwrap();
        let full = compute_moment_table(&p, 30, &c).unwrap();
        let strings = full.truncated(12).decimal_values();
        assert_eq!(strings[0].len(), decimal_digits(256) + 1 + 3); // d.ddd…e-1
        let mut back = MomentTable::from_decimal(p, 256, &strings).unwrap();
        back.extend_to(30);
        back.check_invariants().unwrap();
        for (x, y) in back.values().iter().zip(full.values()) {
            assert!(rel_diff(x, y) < 1e-70);
        }
    }

    #[test]
    fn corrupted_table_fails_invariants() {
        let c = ctx();
        let p = WeightParams::new(0.0, 1.0).unwrap();
        let mut s = compute_moment_table(&p, 6, &c).unwrap().decimal_values();
        s[4] = String::from("1.0e0");
        assert!(matches!(
            MomentTable::from_decimal(p, 256, &s),
            Err(MomentError::Invariant { .. })
        ));
    }
}
