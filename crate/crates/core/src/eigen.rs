//! Certified smallest eigenvalue of `H_N`.
//!
//! `H_N` is reduced to a symmetric tridiagonal `T` by Householder
//! reflections, and the smallest eigenvalue of `T` is bracketed by Sturm
//! counts. The bracket starts at the Rayleigh lower bound and the smallest
//! diagonal entry of `T`. The whole computation is repeated 64 bits wider;
//! precision doubles until the two runs agree.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::hankel::{assemble_at, kernel_diagonal, rayleigh_lower_bound, HankelError, HankelSystem};
use crate::moments::{compute_moment_table, MomentError, MomentTable, WeightParams};
use crate::numerics::{Interval, PrecisionContext};
use crate::real::Real;

/// Default relative enclosure width, as a power of two.
pub const DEFAULT_REL_WIDTH_EXPONENT: u32 = 48;
/// Width of the confirming run above the primary one.
pub const CONFIRM_EXTRA_BITS: usize = 64;
const MAX_BISECTION_STEPS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("precision ceiling of {max_bits} bits reached (last lambda estimate {last_lambda:?})")]
    BitsCeiling { max_bits: usize, last_lambda: Option<f64>, escalations: u32 },
    #[error(transparent)]
    Hankel(#[from] HankelError),
    #[error(transparent)]
    Moments(#[from] MomentError),
}

/// Symmetric tridiagonal matrix similar to `H_N`.
#[derive(Clone, Debug)]
pub struct TridiagonalForm {
    pub diag: Vec<Real>,
    /// `b_1 … b_N`, below the diagonal.
    pub offdiag: Vec<Real>,
    pub bits: usize,
    offdiag_sq: Vec<Real>,
}

impl TridiagonalForm {
    pub fn new(diag: Vec<Real>, offdiag: Vec<Real>, bits: usize) -> Self {
        assert_eq!(offdiag.len() + 1, diag.len().max(1));
        let offdiag_sq = offdiag.iter().map(Real::square).collect();
        TridiagonalForm {
            diag,
            offdiag,
            bits,
            offdiag_sq,
        }
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn trace(&self) -> Real {
        let mut s = Real::zero(self.bits);
        for d in &self.diag {
            s += d;
        }
        s
    }

    pub fn min_diagonal(&self) -> Real {
        self.diag.iter().cloned().reduce(Real::min).expect("non-empty")
    }
}

/// Householder reduction of the dense `H_N` at the system precision.
pub fn tridiagonalize(sys: &HankelSystem) -> TridiagonalForm {
    let mut a = sys.dense();
    let n = a.len();
    let bits = sys.bits();
    let zero = Real::zero(bits);
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut norm2 = zero.clone();
        for row in a.iter().skip(k + 1) {
            norm2 += &row[k].square();
        }
        diag.push(a[k][k].clone());
        if norm2.is_zero() {
            off.push(zero.clone());
            continue;
        }
        let x0 = a[k + 1][k].clone();
        let norm = norm2.sqrt();
        let alpha = if x0.is_negative() { norm } else { -norm };
        let mut v: Vec<Real> = (k + 1..n).map(|i| a[i][k].clone()).collect();
        v[0] = &v[0] - &alpha;
        // vᵀv = 2(‖x‖² - α x₀)
        let vtv = (&norm2 - &(&alpha * &x0)).ldexp(1);
        let beta = vtv.recip().ldexp(1);
        let p: Vec<Real> = (0..m)
            .map(|i| {
                let row = &a[k + 1 + i];
                let mut s = zero.clone();
                for (j, vj) in v.iter().enumerate() {
                    s += &(&row[k + 1 + j] * vj);
                }
                &s * &beta
            })
            .collect();
        let mut vp = zero.clone();
        for (vi, pi) in v.iter().zip(&p) {
            vp += &(vi * pi);
        }
        let kk = (&beta * &vp).ldexp(-1);
        let w: Vec<Real> = p.iter().zip(&v).map(|(pi, vi)| pi - &(&kk * vi)).collect();
        for i in 0..m {
            for j in 0..=i {
                let upd = &(&v[i] * &w[j]) + &(&w[i] * &v[j]);
                let val = &a[k + 1 + i][k + 1 + j] - &upd;
                a[k + 1 + j][k + 1 + i] = val.clone();
                a[k + 1 + i][k + 1 + j] = val;
            }
        }
        off.push(alpha);
    }
    if n >= 2 {
        diag.push(a[n - 2][n - 2].clone());
        off.push(a[n - 1][n - 2].clone());
    }
    diag.push(a[n - 1][n - 1].clone());
    TridiagonalForm::new(diag, off, bits)
}

/// Number of eigenvalues of `T` below `x`, from the signs of the pivots of
/// `T - xI = LDLᵀ`.
pub fn sturm_count(t: &TridiagonalForm, x: &Real) -> usize {
    let mut count = 0;
    let mut d = &t.diag[0] - x;
    for i in 0..t.order() {
        if i > 0 {
            let shifted = &t.diag[i] - x;
            d = &shifted - &(&t.offdiag_sq[i - 1] / &d);
        }
        if d.is_zero() {
            // nudge off an exact eigenvalue by one unit in the last place
            let scale = if i > 0 { t.offdiag[i - 1].abs() } else { t.diag[i].abs() } + x.abs();
            d = scale.ldexp(-(t.bits as i32));
        }
        if d.is_negative() {
            count += 1;
        }
    }
    count
}

/// `128 + ⌈2(N+1) log₂(2N+α+2)⌉ + ⌈6√(N+1)⌉` bits.
pub fn precision_policy(n: usize, p: &WeightParams) -> usize {
    let m = (n + 1) as f64;
    let growth = libm::ceil(2.0 * m * libm::log2(2.0 * n as f64 + p.alpha() + 2.0)).max(0.0);
    128 + growth as usize + libm::ceil(6.0 * libm::sqrt(m)) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EigenOptions {
    /// Enclosure width target `2^{-rel_width_exponent}` (relative).
    pub rel_width_exponent: u32,
    /// Escalation stops with an error beyond this width.
    pub max_bits: usize,
}

impl EigenOptions {
    pub fn for_bits(bits: usize) -> Self {
        EigenOptions {
            rel_width_exponent: DEFAULT_REL_WIDTH_EXPONENT,
            max_bits: (bits * 8).max(4096),
        }
    }
}

/// `λ_N` with its enclosure and the precision that certified it.
#[derive(Clone, Debug)]
pub struct EigenCertificate {
    pub lambda_min: Real,
    pub enclosure: Interval,
    /// Width of the confirming run.
    pub bits_used: usize,
    /// Number of precision doublings.
    pub escalations: u32,
    pub rayleigh_bound: Real,
    /// `log2` relative difference between the primary and confirming runs.
    pub agreement_log2: f64,
}

struct Run {
    enclosure: Interval,
    lambda: Real,
    bound: Real,
}

/// `None` when the factorization or the Sturm counts show the precision is
/// too low to see a positive definite matrix.
fn run_once(table: &MomentTable, n: usize, bits: usize, width_exp: u32) -> Option<Run> {
    let sys = assemble_at(table, n, bits).ok()?;
    let bound = rayleigh_lower_bound(&kernel_diagonal(&sys));
    let t = tridiagonalize(&sys);
    let zero = Real::zero(bits);
    if sturm_count(&t, &zero) != 0 {
        return None;
    }
    let mut lo = &bound * (1.0 - libm::exp2(-8.0));
    while sturm_count(&t, &lo) != 0 {
        lo = lo.ldexp(-8);
        if lo.log2_abs() < bound.log2_abs() - 4096.0 {
            return None;
        }
    }
    let mut hi = t.min_diagonal();
    while sturm_count(&t, &hi) == 0 {
        hi = hi.ldexp(1);
    }
    let tol = -(width_exp as f64);
    for _ in 0..MAX_BISECTION_STEPS {
        let width = &hi - &lo;
        if width.is_zero() || width.log2_abs() - hi.log2_abs() <= tol {
            break;
        }
        let mid = if hi.log2_abs() - lo.log2_abs() > 1.0 {
            (&lo * &hi).sqrt()
        } else {
            (&lo + &hi).ldexp(-1)
        };
        if sturm_count(&t, &mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = (&lo + &hi).ldexp(-1);
    Some(Run {
        enclosure: Interval::new(lo, hi).ok()?,
        lambda,
        bound,
    })
}

/// Certified `λ_N` starting at the precision of `ctx`.
pub fn smallest_eigenvalue(sys: &HankelSystem, ctx: &PrecisionContext) -> Result<EigenCertificate, EigenError> {
    smallest_eigenvalue_with(sys, ctx.bits(), &EigenOptions::for_bits(ctx.bits()))
}

/// Certified `λ_N`, first run at `start_bits`.
pub fn smallest_eigenvalue_with(
    sys: &HankelSystem,
    start_bits: usize,
    opts: &EigenOptions,
) -> Result<EigenCertificate, EigenError> {
    let n = sys.n();
    let params = *sys.params();
    let mut table = sys.source().clone();
    let mut bits = start_bits;
    let mut escalations = 0u32;
    let mut last_lambda = None;
    loop {
        let confirm = bits + CONFIRM_EXTRA_BITS;
        if confirm > opts.max_bits {
            return Err(EigenError::BitsCeiling {
                max_bits: opts.max_bits,
                last_lambda,
                escalations,
            });
        }
        if table.bits() < confirm {
            let ctx = PrecisionContext::with_bits(confirm).expect("valid width");
            table = compute_moment_table(&params, (2 * n).max(2), &ctx)?;
        }
        let primary = run_once(&table, n, bits, opts.rel_width_exponent);
        let check = primary
            .as_ref()
            .and_then(|_| run_once(&table, n, confirm, opts.rel_width_exponent));
        if let (Some(p), Some(c)) = (primary, check) {
            last_lambda = Some(c.lambda.to_f64());
            let d = (&p.lambda - &c.lambda).abs();
            let agreement = if d.is_zero() {
                f64::NEG_INFINITY
            } else {
                d.log2_abs() - c.lambda.log2_abs()
            };
            if agreement <= -(opts.rel_width_exponent as f64) {
                return Ok(EigenCertificate {
                    lambda_min: c.lambda,
                    enclosure: c.enclosure,
                    bits_used: confirm,
                    escalations,
                    rayleigh_bound: c.bound,
                    agreement_log2: agreement,
                });
            }
        }
        bits *= 2;
        escalations += 1;
    }
}

/// Coefficients of `det(xI - H)` by cofactor expansion, lowest degree first.
pub fn characteristic_polynomial(h: &[Vec<Real>]) -> Vec<Real> {
    let n = h.len();
    let bits = h[0][0].bits();
    // entries of xI - H as polynomials of degree <= 1
    let m: Vec<Vec<Vec<Real>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c0 = -&h[i][j];
                    if i == j {
                        vec![c0, Real::one(bits)]
                    } else {
                        vec![c0]
                    }
                })
                .collect()
        })
        .collect();
    let cols: Vec<usize> = (0..n).collect();
    cofactor(&m, 0, &cols, bits)
}

fn poly_mul(a: &[Real], b: &[Real], bits: usize) -> Vec<Real> {
    let mut out = vec![Real::zero(bits); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += &(x * y);
        }
    }
    out
}

fn cofactor(m: &[Vec<Vec<Real>>], row: usize, cols: &[usize], bits: usize) -> Vec<Real> {
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc = vec![Real::zero(bits)];
    for (pos, &c) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = cofactor(m, row + 1, &rest, bits);
        let term = poly_mul(&m[row][c], &minor, bits);
        if acc.len() < term.len() {
            acc.resize(term.len(), Real::zero(bits));
        }
        for (k, v) in term.iter().enumerate() {
            if pos % 2 == 0 {
                acc[k] += v;
            } else {
                acc[k] -= v;
            }
        }
    }
    acc
}

fn poly_eval(p: &[Real], x: &Real) -> Real {
    let mut acc = Real::zero(x.bits());
    for c in p.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Smallest root of `det(xI - H)` for a positive definite `H`: geometric
/// scan upward from `start` (which must lie below the root) to the first
/// sign change, then bisection to relative `2^{-width_exp}`.
pub fn smallest_charpoly_root(h: &[Vec<Real>], start: &Real, width_exp: u32) -> Real {
    let p = characteristic_polynomial(h);
    let below_sign = poly_eval(&p, start).is_negative();
    let mut lo = start.clone();
    let mut hi = start * 1.01;
    while poly_eval(&p, &hi).is_negative() == below_sign {
        lo = hi.clone();
        hi = &hi * 1.01;
    }
    for _ in 0..MAX_BISECTION_STEPS {
        if (&hi - &lo).log2_abs() - hi.log2_abs() <= -(width_exp as f64) {
            break;
        }
        let mid = (&lo + &hi).ldexp(-1);
        if poly_eval(&p, &mid).is_negative() == below_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (&lo + &hi).ldexp(-1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hankel::assemble;
    use crate::real::{rel_diff, Arith};

    fn system(alpha: f64, t: f64, n: usize, bits: usize) -> HankelSystem {
        let ctx = PrecisionContext::with_bits(bits).unwrap();
        let p = WeightParams::new(alpha, t).unwrap();
        let table = compute_moment_table(&p, (2 * n).max(2), &ctx).unwrap();
        assemble(&table, n).unwrap()
    }

    #[test]
    fn two_by_two_is_unchanged() {
        let s = system(0.0, 0.0, 1, 128);
        let t = tridiagonalize(&s);
        let f: Vec<f64> = t.diag.iter().chain(&t.offdiag).map(Real::to_f64).collect();
        assert_eq!(f, [1.0, 2.0, 1.0]);
    }

    #[test]
    fn trace_is_preserved() {
        let t = tridiagonalize(&system(0.0, 0.0, 2, 128));
        assert!((t.trace().to_f64() - 27.0).abs() < 1e-12);
        let s = system(0.0, 1.0, 20, 512);
        let t = tridiagonalize(&s);
        let mut tr = Real::zero(512);
        for k in 0..=20 {
            tr += s.entry(k, k);
        }
        assert!(rel_diff(&t.trace(), &tr) < libm::exp2(-256.0));
    }

    #[test]
    fn sturm_count_examples() {
        let s = system(0.0, 0.0, 1, 128);
        let t = tridiagonalize(&s);
        assert_eq!(sturm_count(&t, &Real::zero(128)), 0);
        assert_eq!(sturm_count(&t, &Real::from_f64(0.5, 128)), 1);
        assert_eq!(sturm_count(&t, &(&t.trace() + 1.0)), 2);
        let s = system(0.5, 1.0, 8, 256);
        let t = tridiagonalize(&s);
        assert_eq!(sturm_count(&t, &(&t.trace() * 1.5)), 9);
    }

    #[test]
    fn golden_ratio_eigenvalue() {
        let s = system(0.0, 0.0, 1, 256);
        let opts = EigenOptions {
            rel_width_exponent: 110,
            max_bits: 4096,
        };
        let c = smallest_eigenvalue_with(&s, 256, &opts).unwrap();
        let ar = Arith::new(256);
        let exact = (&ar.num(3.0) - &ar.num(5.0).sqrt()).ldexp(-1);
        assert!(rel_diff(&c.lambda_min, &exact) < 1e-31);
        assert!(c.enclosure.contains(&exact));
        assert!(c.rayleigh_bound <= *c.enclosure.lo());
    }

    #[test]
    fn order_zero_is_first_moment() {
        let s = system(0.4, 2.0, 0, 128);
        let c = smallest_eigenvalue(&s, &PrecisionContext::with_bits(128).unwrap()).unwrap();
        assert!(rel_diff(&c.lambda_min, &s.moments()[0]) < 1e-13);
    }

    #[test]
    fn policy_values() {
        let p0 = WeightParams::new(0.0, 0.0).unwrap();
        assert_eq!(precision_policy(0, &p0), 128 + 2 + 6);
        assert_eq!(precision_policy(100, &p0), 128 + 1547 + 61);
        assert!(precision_policy(101, &p0) > precision_policy(100, &p0));
    }

    #[test]
    fn laguerre_order_forty_matches_double_precision_run() {
        let p = WeightParams::new(0.0, 0.0).unwrap();
        let bits = precision_policy(40, &p);
        let s = system(0.0, 0.0, 40, bits + CONFIRM_EXTRA_BITS);
        let c = smallest_eigenvalue_with(&s, bits, &EigenOptions::for_bits(bits)).unwrap();
        assert_eq!(c.escalations, 0);
        let s2 = system(0.0, 0.0, 40, 2 * bits + CONFIRM_EXTRA_BITS);
        let c2 = smallest_eigenvalue_with(&s2, 2 * bits, &EigenOptions::for_bits(2 * bits)).unwrap();
        assert!(rel_diff(&c.lambda_min, &c2.lambda_min) < 1e-10);
        assert!(c.enclosure.lo().is_positive());
        assert!(c.enclosure.relative_width() <= libm::exp2(-48.0));
    }

    #[test]
    fn low_start_precision_escalates() {
        let p = WeightParams::new(0.0, 1.0).unwrap();
        let s = system(0.0, 1.0, 12, 512);
        let c = smallest_eigenvalue_with(&s, 64, &EigenOptions::for_bits(64)).unwrap();
        assert!(c.escalations >= 1);
        let policy = precision_policy(12, &p);
        let reference = smallest_eigenvalue_with(&s, policy, &EigenOptions::for_bits(policy)).unwrap();
        assert!(rel_diff(&c.lambda_min, &reference.lambda_min) < 1e-13);
    }

    #[test]
    fn ceiling_is_reported() {
        let s = system(0.0, 1.0, 12, 256);
        let opts = EigenOptions {
            rel_width_exponent: 48,
            max_bits: 200,
        };
        assert!(matches!(
            smallest_eigenvalue_with(&s, 64, &opts),
            Err(EigenError::BitsCeiling { max_bits: 200, .. })
        ));
    }

    #[test]
    fn charpoly_oracle_agrees_for_small_orders() {
        for n in 1..=5 {
            let s = system(0.5, 1.0, n, 256);
            let c = smallest_eigenvalue(&s, &PrecisionContext::with_bits(256).unwrap()).unwrap();
            let hi = system(0.5, 1.0, n, 1024);
            let start = &c.rayleigh_bound.with_bits(1024) * 0.5;
            let root = smallest_charpoly_root(&hi.dense(), &start, 60);
            assert!(rel_diff(&c.lambda_min, &root) < libm::exp2(-40.0), "N={n}");
        }
    }

    #[test]
    fn interlacing_on_nested_orders() {
        let p = WeightParams::new(0.0, 1.0).unwrap();
        let ctx = PrecisionContext::with_bits(512).unwrap();
        let table = compute_moment_table(&p, 24, &ctx).unwrap();
        let mut prev: Option<Real> = None;
        for n in 0..=12 {
            let s = assemble_at(&table, n, 384).unwrap();
            let c = smallest_eigenvalue_with(&s, 384, &EigenOptions::for_bits(384)).unwrap();
            if let Some(p) = prev {
                assert!(c.lambda_min <= p);
            }
            prev = Some(c.lambda_min);
        }
    }
}
