//! Smallest eigenvalues of Hankel moment matrices for the singularly
//! perturbed Laguerre weight `w(x) = x^α e^{-x-t/x}` on `(0, ∞)`.
//!
//! The crate is `no_std` (with `alloc`): every routine is a pure function of
//! its inputs. File formats, caching and the command line live in the
//! companion `hankel-cli` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod eigen;
pub mod hankel;
pub mod moments;
pub mod numerics;
pub mod real;

pub use numerics::{EndpointPair, Interval, NumericsError, PrecisionContext};
pub use real::{Arith, Real};
