//! Precision contract, quadrature engines, a 2-D Newton solver and the
//! half-interval integral identity checks.

mod identities;
mod newton;
mod quadrature;

pub use identities::{verify_identity, verify_identity_suite, Identity, IdentityReport};
pub use newton::{newton_solve_2d, NewtonReport, NewtonSystem};
pub use quadrature::{
    integrate_finite_sqrt_weight, integrate_halfline, integrate_line, HalfLineNode, LineNode,
    QuadratureReport, MAX_HALFLINE_LEVEL, MAX_LINE_LEVEL, MAX_SQRT_WEIGHT_LEVEL,
};

use alloc::vec::Vec;
use thiserror::Error;

use crate::real::Real;

/// Working precision for all multiprecision arithmetic.
///
/// `bits` is the binary mantissa width; quadratures target a relative error
/// of `2^-quad_tolerance_exponent`. Rounding is always round-to-nearest-even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    bits: usize,
    quad_tolerance_exponent: usize,
}

impl PrecisionContext {
    pub const MIN_BITS: usize = 64;

    pub fn new(bits: usize, quad_tolerance_exponent: usize) -> Result<Self, NumericsError> {
        if bits < Self::MIN_BITS {
            return Err(NumericsError::InvalidPrecision {
                bits,
                quad_tolerance_exponent,
            });
        }
        if quad_tolerance_exponent == 0 || quad_tolerance_exponent > bits - 16 {
            return Err(NumericsError::InvalidPrecision {
                bits,
                quad_tolerance_exponent,
            });
        }
        Ok(PrecisionContext {
            bits,
            quad_tolerance_exponent,
        })
    }

    /// Context with the tightest reachable quadrature target, `bits - 16`.
    pub fn with_bits(bits: usize) -> Result<Self, NumericsError> {
        Self::new(bits, bits.saturating_sub(16))
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn quad_tolerance_exponent(&self) -> usize {
        self.quad_tolerance_exponent
    }

    /// Same tolerance margin, `extra` more mantissa bits.
    pub fn widened(&self, extra: usize) -> Self {
        PrecisionContext {
            bits: self.bits + extra,
            quad_tolerance_exponent: self.quad_tolerance_exponent + extra,
        }
    }

    /// Relative quadrature target as a double (may underflow to 0 past ~1074 bits).
    pub fn quad_tolerance(&self) -> f64 {
        libm::exp2(-(self.quad_tolerance_exponent as f64))
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    lo: Real,
    hi: Real,
}

impl Interval {
    pub fn new(lo: Real, hi: Real) -> Result<Self, NumericsError> {
        if !(lo <= hi) {
            return Err(NumericsError::Domain("interval requires lo <= hi"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> &Real {
        &self.lo
    }

    pub fn hi(&self) -> &Real {
        &self.hi
    }

    pub fn width(&self) -> Real {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Real {
        (&self.lo + &self.hi).ldexp(-1)
    }

    pub fn contains(&self, x: &Real) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `width / |midpoint|` as a double.
    pub fn relative_width(&self) -> f64 {
        let m = self.midpoint();
        if m.is_zero() {
            return f64::INFINITY;
        }
        libm::exp2(self.width().log2_abs() - m.log2_abs())
    }
}

/// Support `[a, b]` of an equilibrium density, `0 < a < b`.
///
/// The hard-edge case `a = 0` is representable only through
/// [`EndpointPair::hard_edge`], which asymptotic evaluators accept but the
/// integral identity checks reject.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointPair {
    a: f64,
    b: f64,
}

impl EndpointPair {
    pub fn new(a: f64, b: f64) -> Result<Self, NumericsError> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(NumericsError::Domain("endpoints require 0 < a < b"));
        }
        Ok(EndpointPair { a, b })
    }

    pub fn hard_edge(b: f64) -> Result<Self, NumericsError> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(NumericsError::Domain("hard-edge support requires b > 0"));
        }
        Ok(EndpointPair { a: 0.0, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_hard_edge(&self) -> bool {
        self.a == 0.0
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("invalid precision: bits={bits}, quadrature tolerance exponent={quad_tolerance_exponent}")]
    InvalidPrecision {
        bits: usize,
        quad_tolerance_exponent: usize,
    },
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("identity {identity}: {reason}")]
    IdentityDomain {
        identity: Identity,
        reason: &'static str,
    },
    #[error("quadrature did not converge after {levels} levels (last {last:e}, previous {previous:e})")]
    QuadratureNotConverged {
        levels: usize,
        last: f64,
        previous: f64,
    },
    #[error("integrand has not decayed at u = {u} of the double-exponential window")]
    SlowDecay { u: f64 },
    #[error("integrand is not finite at x = {x:e}")]
    NonFiniteIntegrand { x: f64 },
    #[error("Newton iteration failed after {} iterations (residual trace {trace:?})", trace.len())]
    NewtonDiverged { trace: Vec<f64> },
}
