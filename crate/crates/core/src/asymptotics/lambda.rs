use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::moments::WeightParams;

use super::{endpoint_expansion, AsymptoticsError};

/// Half-width multiplier `ω` of the window `N - ω√N ≤ μ ≤ N`.
pub const KERNEL_WINDOW_OMEGA: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum PredictionVariant {
    /// Bracket `√(4N+2α) + t/(2√a_N) - t/2`.
    #[default]
    Proof,
    /// Bracket `√(4N+2α) + t/(2√a_N) - 2t`.
    Theorem,
    T0Alpha,
    T0Szego,
}

impl PredictionVariant {
    pub const ALL: [PredictionVariant; 4] = [Self::Proof, Self::Theorem, Self::T0Alpha, Self::T0Szego];

    pub fn name(self) -> &'static str {
        match self {
            Self::Proof => "proof",
            Self::Theorem => "theorem",
            Self::T0Alpha => "t0-alpha",
            Self::T0Szego => "t0-szego",
        }
    }

    pub fn needs_positive_t(self) -> bool {
        matches!(self, Self::Proof | Self::Theorem)
    }
}

impl fmt::Display for PredictionVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PredictionVariant {
    type Err = AsymptoticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or(AsymptoticsError::Domain("variant must be proof, theorem, t0-alpha or t0-szego"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaPrediction {
    /// May underflow to zero for very large `N`; `ln_value` does not.
    pub value: f64,
    pub ln_value: f64,
    pub variant: PredictionVariant,
}

fn general_bracket(alpha: f64, t: f64, n: u64, a_n: f64, tail: f64) -> Result<f64, AsymptoticsError> {
    let bracket = libm::sqrt(4.0 * n as f64 + 2.0 * alpha) + t / (2.0 * libm::sqrt(a_n)) - tail;
    if bracket > 0.0 {
        Ok(bracket)
    } else {
        Err(AsymptoticsError::Domain("prediction bracket is not positive"))
    }
}

pub fn lambda_prediction(p: &WeightParams, n: u64, variant: PredictionVariant) -> Result<LambdaPrediction, AsymptoticsError> {
    let (alpha, t) = (p.alpha(), p.t());
    if n == 0 {
        return Err(AsymptoticsError::Domain("N must be at least 1"));
    }
    let nf = n as f64;
    let ln_pi32 = 1.5 * libm::log(PI);
    let ln_value = match variant {
        PredictionVariant::Proof | PredictionVariant::Theorem => {
            if t == 0.0 {
                return Err(AsymptoticsError::Domain("general forms need t > 0; use a t0 variant"));
            }
            let a_n = endpoint_expansion(p, n, true)?.a_n;
            let tail = if variant == PredictionVariant::Proof { t / 2.0 } else { 2.0 * t };
            let bracket = general_bracket(alpha, t, n, a_n, tail)?;
            libm::log(8.0) + ln_pi32 + 0.5 * libm::log(bracket) + 1.0 + t
                - 2.0 * libm::sqrt(4.0 * nf + 2.0 * alpha)
                - t / libm::sqrt(a_n)
        }
        PredictionVariant::T0Alpha => {
            let s = 2.0 * nf + alpha;
            if !(s > 0.0) {
                return Err(AsymptoticsError::Domain("2N + alpha must be positive"));
            }
            3.25 * core::f64::consts::LN_2 + ln_pi32 + 1.0 + 0.25 * libm::log(s)
                - libm::pow(2.0, 1.5) * libm::sqrt(s)
        }
        PredictionVariant::T0Szego => {
            3.5 * core::f64::consts::LN_2 + ln_pi32 + 1.0 + 0.25 * libm::log(nf) - 4.0 * libm::sqrt(nf)
        }
    };
    Ok(LambdaPrediction {
        value: libm::exp(ln_value),
        ln_value,
        variant,
    })
}

/// `[N - ω√N, N]` clipped at zero.
pub fn kernel_window(n_total: u64) -> (u64, u64) {
    let lo = n_total as f64 - KERNEL_WINDOW_OMEGA * libm::sqrt(n_total as f64);
    (libm::ceil(libm::fmax(lo, 0.0)) as u64, n_total)
}

/// Diagonal `𝒦_{μμ}` of the large-`N` kernel, for `μ` in [`kernel_window`].
///
/// At `t = 0` the `t`-dependent factors are dropped.
pub fn kernel_diag_asymptotic(p: &WeightParams, n_total: u64, mu: u64) -> Result<f64, AsymptoticsError> {
    let (alpha, t) = (p.alpha(), p.t());
    let (lo, hi) = kernel_window(n_total);
    if mu < lo || mu > hi {
        return Err(AsymptoticsError::OutsideWindow { mu, lo, hi });
    }
    let four_n = libm::sqrt(4.0 * n_total as f64 + 2.0 * alpha);
    let (bracket, shift) = if t > 0.0 {
        let a_n = endpoint_expansion(p, n_total, true)?.a_n;
        (general_bracket(alpha, t, n_total, a_n, t / 2.0)?, -1.0 - t + t / libm::sqrt(a_n))
    } else {
        (four_n, -1.0)
    };
    let ln = -0.5 * libm::log(PI) - libm::log(four_n) - 0.5 * libm::log(bracket)
        + shift
        + 2.0 * libm::sqrt(4.0 * mu as f64 + 2.0 * alpha);
    Ok(libm::exp(ln))
}
