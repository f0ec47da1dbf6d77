//! Large-`N` predictions: support endpoints, asymptotic forms of the
//! orthonormal polynomials, `λ_N` and the kernel diagonal.
//!
//! Closed-form expressions are evaluated in double precision through their
//! logarithms; the endpoint system and the consolidated polynomial form run
//! at a caller-supplied precision.

mod endpoints;
mod lambda;
mod polynomial;

pub use endpoints::{
    endpoint_expansion, endpoint_residuals, endpoints_t0_closed_form, solve_endpoints_exact, EndpointExpansion,
    EndpointSolution,
};
pub use lambda::{
    kernel_diag_asymptotic, kernel_window, lambda_prediction, LambdaPrediction,
    PredictionVariant, KERNEL_WINDOW_OMEGA,
};
pub use polynomial::{pn_eta_form, pn_full, pn_simplified, pn_simplified_ln, perron_form, ScaledVariable, SignedLn};

use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("outside the domain of the formula: {0}")]
    Domain(&'static str),
    #[error("hard edge: t = 0 and alpha = 0 give a = 0, b = {b}")]
    HardEdge { b: f64 },
    #[error("mu = {mu} outside the kernel window [{lo}, {hi}]")]
    OutsideWindow { mu: u64, lo: u64, hi: u64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
