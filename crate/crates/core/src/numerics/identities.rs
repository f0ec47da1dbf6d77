//! Closed forms for integrals against `1/√((b-x)(x-a))`, checked by
//! quadrature.
//!
//! | id | integrand `g(x)`        | closed form |
//! |----|-------------------------|-------------|
//! | A1 | `1`                     | `π` |
//! | A2 | `x`                     | `π(a+b)/2` |
//! | A3 | `1/x²`                  | `(a+b)π / (2(ab)^{3/2})` |
//! | A4 | `1/(x+t)`               | `π / √((t+a)(t+b))` |
//! | A5 | `log(x+t)/x`            | `π/√(ab) · log[((√(ab) + √((t+a)(t+b)))² - t²) / (√a+√b)²]` |
//! | B1 | `1/(x(x-t))`            | `-(π/t) [1/√(ab) + 1/√((t-a)(t-b))]` |
//!
//! In B1 the root `√((t-a)(t-b))` is the branch of `√((ζ-a)(ζ-b))` that is
//! analytic off `[a, b]` and behaves like `ζ` at infinity: positive for
//! `t > b`, negative for `t < a`.

use core::fmt;

use super::{integrate_finite_sqrt_weight, EndpointPair, NumericsError, PrecisionContext};
use crate::real::{Arith, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Identity {
    A1,
    A2,
    A3,
    A4,
    A5,
    B1,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::A1,
        Identity::A2,
        Identity::A3,
        Identity::A4,
        Identity::A5,
        Identity::B1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::A1 => "A1",
            Identity::A2 => "A2",
            Identity::A3 => "A3",
            Identity::A4 => "A4",
            Identity::A5 => "A5",
            Identity::B1 => "B1",
        }
    }

    fn check_domain(self, endpoints: &EndpointPair, t: f64) -> Result<(), NumericsError> {
        let fail = |reason| Err(NumericsError::IdentityDomain { identity: self, reason });
        if endpoints.is_hard_edge() {
            return fail("support must satisfy a > 0");
        }
        match self {
            Identity::A4 | Identity::A5 if !(t > 0.0) => fail("shift must be positive"),
            Identity::B1 if t == 0.0 => fail("pole must be nonzero"),
            Identity::B1 if t >= endpoints.a() && t <= endpoints.b() => {
                fail("pole lies inside the support")
            }
            _ if !t.is_finite() => fail("shift must be finite"),
            _ => Ok(()),
        }
    }

    fn integrand(self, x: &Real, t: &Real, ar: &mut Arith) -> Real {
        match self {
            Identity::A1 => Real::one(x.bits()),
            Identity::A2 => x.clone(),
            Identity::A3 => x.square().recip(),
            Identity::A4 => (x + t).recip(),
            Identity::A5 => &ar.ln(&(x + t)) / x,
            Identity::B1 => (x * &(x - t)).recip(),
        }
    }

    /// Closed form at `(a, b, t)`; `t` is ignored by A1-A3.
    pub fn closed_form(self, a: &Real, b: &Real, t: &Real, ar: &mut Arith) -> Real {
        let pi = ar.pi();
        let ab = a * b;
        let sqrt_ab = ab.sqrt();
        match self {
            Identity::A1 => pi,
            Identity::A2 => (&pi * &(a + b)).ldexp(-1),
            Identity::A3 => &(&pi * &(a + b)) / &(&ab * &sqrt_ab).ldexp(1),
            Identity::A4 => &pi / &(&(t + a) * &(t + b)).sqrt(),
            Identity::A5 => {
                let root = (&(t + a) * &(t + b)).sqrt();
                let num = (&sqrt_ab + &root).square() - t.square();
                let den = (a.sqrt() + b.sqrt()).square();
                &(&pi / &sqrt_ab) * &ar.ln(&(num / den))
            }
            Identity::B1 => {
                let mut root = (&(t - a) * &(t - b)).sqrt();
                if t < a {
                    root = -root;
                }
                -(&(&pi / t) * &(sqrt_ab.recip() + root.recip()))
            }
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct IdentityResidual {
    pub identity: Identity,
    pub quadrature: Real,
    pub closed_form: Real,
    /// `log2 |quadrature - closed| / |closed|`.
    pub rel_residual_log2: f64,
}

impl IdentityResidual {
    pub fn rel_residual(&self) -> f64 {
        libm::exp2(self.rel_residual_log2)
    }

    pub fn passes(&self, ctx: &PrecisionContext) -> bool {
        self.rel_residual_log2 <= -(ctx.quad_tolerance_exponent() as f64)
    }
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub endpoints: EndpointPair,
    pub t_shift: f64,
    pub residuals: [IdentityResidual; 6],
}

impl IdentityReport {
    pub fn worst_log2(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.rel_residual_log2)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn all_pass(&self, ctx: &PrecisionContext) -> bool {
        self.residuals.iter().all(|r| r.passes(ctx))
    }
}

/// Check one identity at `(a, b)` with shift/pole `t_shift`.
pub fn verify_identity(
    identity: Identity,
    endpoints: &EndpointPair,
    t_shift: f64,
    ctx: &PrecisionContext,
) -> Result<IdentityResidual, NumericsError> {
    identity.check_domain(endpoints, t_shift)?;
    let t = Real::from_f64(t_shift, ctx.bits());
    let quad = integrate_finite_sqrt_weight(|x, ar| identity.integrand(x, &t, ar), endpoints, ctx)?;
    let mut ar = Arith::new(ctx.bits());
    let closed = identity.closed_form(&ar.num(endpoints.a()), &ar.num(endpoints.b()), &t, &mut ar);
    let diff = (&quad.value - &closed).abs();
    let rel_residual_log2 = if diff.is_zero() {
        f64::NEG_INFINITY
    } else {
        diff.log2_abs() - closed.log2_abs()
    };
    Ok(IdentityResidual {
        identity,
        quadrature: quad.value,
        closed_form: closed,
        rel_residual_log2,
    })
}

/// All six identities; any precondition violation fails the whole suite,
/// naming the first offending identity.
pub fn verify_identity_suite(
    endpoints: &EndpointPair,
    t_shift: f64,
    ctx: &PrecisionContext,
) -> Result<IdentityReport, NumericsError> {
    for id in Identity::ALL {
        id.check_domain(endpoints, t_shift)?;
    }
    let r = |id| verify_identity(id, endpoints, t_shift, ctx);
    Ok(IdentityReport {
        endpoints: *endpoints,
        t_shift,
        residuals: [
            r(Identity::A1)?,
            r(Identity::A2)?,
            r(Identity::A3)?,
            r(Identity::A4)?,
            r(Identity::A5)?,
            r(Identity::B1)?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256, 200).unwrap()
    }

    #[test]
    fn suite_passes_on_unit_support() {
        let c = ctx();
        let e = EndpointPair::new(1.0, 2.0).unwrap();
        let rep = verify_identity_suite(&e, 3.0, &c).unwrap();
        for r in &rep.residuals {
            assert!(r.passes(&c), "{} residual 2^{}", r.identity, r.rel_residual_log2);
        }
    }

    #[test]
    fn b1_with_pole_left_of_support() {
        let c = ctx();
        let e = EndpointPair::new(1.0, 2.0).unwrap();
        let r = verify_identity(Identity::B1, &e, -0.5, &c).unwrap();
        assert!(r.passes(&c), "2^{}", r.rel_residual_log2);
        let r = verify_identity(Identity::B1, &e, 0.25, &c).unwrap();
        assert!(r.passes(&c), "2^{}", r.rel_residual_log2);
    }

    #[test]
    fn pole_inside_support_is_rejected() {
        let e = EndpointPair::new(1.0, 2.0).unwrap();
        let err = verify_identity_suite(&e, 1.5, &ctx()).unwrap_err();
        assert_eq!(
            err,
            NumericsError::IdentityDomain {
                identity: Identity::B1,
                reason: "pole lies inside the support"
            }
        );
    }

    #[test]
    fn negative_shift_names_a4() {
        let e = EndpointPair::new(1.0, 2.0).unwrap();
        match verify_identity_suite(&e, -0.5, &ctx()).unwrap_err() {
            NumericsError::IdentityDomain { identity, .. } => assert_eq!(identity, Identity::A4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hard_edge_support_is_rejected() {
        let e = EndpointPair::hard_edge(4.0).unwrap();
        assert!(verify_identity(Identity::A1, &e, 1.0, &ctx()).is_err());
    }
}
