use alloc::vec::Vec;

use super::{NumericsError, PrecisionContext};
use crate::real::{Arith, Real};

pub const MAX_NEWTON_ITERATIONS: usize = 64;

/// A smooth map `F: R² → R²` with an analytic Jacobian.
pub trait NewtonSystem {
    fn residual(&self, x: &Real, y: &Real, ar: &mut Arith) -> [Real; 2];

    /// `[[∂F0/∂x, ∂F0/∂y], [∂F1/∂x, ∂F1/∂y]]`
    fn jacobian(&self, x: &Real, y: &Real, ar: &mut Arith) -> [[Real; 2]; 2];

    /// Magnitude the residual is measured against.
    fn scale(&self) -> f64 {
        1.0
    }
}

#[derive(Clone, Debug)]
pub struct NewtonReport {
    pub x: Real,
    pub y: Real,
    pub iterations: usize,
    /// `log2 ‖F‖∞` at each iterate, starting point first.
    pub residual_trace: Vec<f64>,
    /// Whether each of the final three step lengths at most halves the one
    /// before; `None` when fewer than three steps were taken.
    pub quadratic: Option<bool>,
}

impl NewtonReport {
    pub fn residual_log2(&self) -> f64 {
        *self.residual_trace.last().unwrap_or(&f64::INFINITY)
    }
}

fn norm_log2(v: &[Real; 2]) -> f64 {
    let l0 = if v[0].is_zero() { f64::NEG_INFINITY } else { v[0].log2_abs() };
    let l1 = if v[1].is_zero() { f64::NEG_INFINITY } else { v[1].log2_abs() };
    l0.max(l1)
}

/// Undamped Newton iteration from `start` until `‖F‖∞ ≤ 2^-tol · scale`.
pub fn newton_solve_2d<S: NewtonSystem>(
    system: &S,
    start: (Real, Real),
    ctx: &PrecisionContext,
) -> Result<NewtonReport, NumericsError> {
    let mut ar = Arith::new(ctx.bits());
    let target = libm::log2(system.scale()) - ctx.quad_tolerance_exponent() as f64;
    let (mut x, mut y) = (start.0.with_bits(ctx.bits()), start.1.with_bits(ctx.bits()));
    let start_mag = libm::fmax(x.to_f64().abs(), y.to_f64().abs()) + 1.0;
    let mut trace = Vec::new();
    let mut steps: Vec<f64> = Vec::new();
    let mut f = system.residual(&x, &y, &mut ar);
    for iteration in 0..=MAX_NEWTON_ITERATIONS {
        if !(f[0].is_finite() && f[1].is_finite()) {
            return Err(NumericsError::NewtonDiverged { trace });
        }
        let r = norm_log2(&f);
        trace.push(r);
        if r <= target {
            let n = steps.len();
            let quadratic = (n >= 3).then(|| {
                steps[n - 3..].windows(2).all(|w| w[1] <= w[0] - 1.0 || w[1] == f64::NEG_INFINITY)
            });
            return Ok(NewtonReport {
                x,
                y,
                iterations: iteration,
                residual_trace: trace,
                quadratic,
            });
        }
        if iteration == MAX_NEWTON_ITERATIONS {
            break;
        }
        let [[j00, j01], [j10, j11]] = system.jacobian(&x, &y, &mut ar);
        let det = &(&j00 * &j11) - &(&j01 * &j10);
        if det.is_zero() || !det.is_finite() {
            return Err(NumericsError::NewtonDiverged { trace });
        }
        // δ = -J⁻¹ F
        let dx = -(&(&(&j11 * &f[0]) - &(&j01 * &f[1])) / &det);
        let dy = -(&(&(&j00 * &f[1]) - &(&j10 * &f[0])) / &det);
        let step = norm_log2(&[dx.clone(), dy.clone()]);
        steps.push(step);
        x += &dx;
        y += &dy;
        let mag = libm::fmax(x.to_f64().abs(), y.to_f64().abs());
        if !(mag.is_finite() && mag <= start_mag * 1e12) {
            return Err(NumericsError::NewtonDiverged { trace });
        }
        f = system.residual(&x, &y, &mut ar);
    }
    Err(NumericsError::NewtonDiverged { trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Affine;
    impl NewtonSystem for Affine {
        fn residual(&self, x: &Real, y: &Real, _: &mut Arith) -> [Real; 2] {
            [x - 1.0, y - 2.0]
        }
        fn jacobian(&self, x: &Real, _: &Real, _: &mut Arith) -> [[Real; 2]; 2] {
            let b = x.bits();
            [[Real::one(b), Real::zero(b)], [Real::zero(b), Real::one(b)]]
        }
    }

    // (x² + y² - 4, x - y): root at (√2, √2)
    struct Circle;
    impl NewtonSystem for Circle {
        fn residual(&self, x: &Real, y: &Real, _: &mut Arith) -> [Real; 2] {
            [&(x.square() + y.square()) - 4.0, x - y]
        }
        fn jacobian(&self, x: &Real, y: &Real, _: &mut Arith) -> [[Real; 2]; 2] {
            let b = x.bits();
            [[x * 2.0, y * 2.0], [Real::one(b), -Real::one(b)]]
        }
    }

    // atan has a bounded basin: Newton diverges from |x0| > ~1.39
    struct Atan;
    impl NewtonSystem for Atan {
        fn residual(&self, x: &Real, y: &Real, ar: &mut Arith) -> [Real; 2] {
            [ar.atan(x), y - 2.0]
        }
        fn jacobian(&self, x: &Real, _: &Real, _: &mut Arith) -> [[Real; 2]; 2] {
            let b = x.bits();
            [[(x.square() + 1.0).recip(), Real::zero(b)], [Real::zero(b), Real::one(b)]]
        }
    }

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256, 220).unwrap()
    }

    #[test]
    fn affine_system_in_one_step() {
        let c = ctx();
        let r = newton_solve_2d(&Affine, (Real::from_f64(0.9, 256), Real::from_f64(2.1, 256)), &c).unwrap();
        assert_eq!(r.x.to_f64(), 1.0);
        assert_eq!(r.y.to_f64(), 2.0);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn nonlinear_system_converges_quadratically() {
        let c = ctx();
        let r = newton_solve_2d(&Circle, (Real::from_f64(1.0, 256), Real::from_f64(2.0, 256)), &c).unwrap();
        assert!((r.x.to_f64() - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(r.residual_log2() <= -220.0);
        assert_eq!(r.quadratic, Some(true));
    }

    #[test]
    fn start_outside_basin_diverges() {
        let c = ctx();
        let err = newton_solve_2d(&Atan, (Real::from_f64(10.0, 256), Real::from_f64(2.0, 256)), &c).unwrap_err();
        match err {
            NumericsError::NewtonDiverged { trace } => assert!(!trace.is_empty()),
            other => panic!("{other:?}"),
        }
        assert!(newton_solve_2d(&Atan, (Real::from_f64(0.5, 256), Real::from_f64(2.0, 256)), &c).is_ok());
    }
}
