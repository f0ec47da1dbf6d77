//! Large-`N` forms of `𝒫_N(z)` off the support, for real `z < a`.
//!
//! On `z < a` the branch `√(z-a) = i√(a-z)`, `√(z-b) = i√(b-z)` makes every
//! factor real; the `i^{2N}` it produces is the `(-1)^N` sign.

use core::f64::consts::PI;

use crate::moments::WeightParams;
use crate::numerics::{EndpointPair, PrecisionContext};
use crate::real::{Arith, Real};

use super::AsymptoticsError;

fn parity(n: u64) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `η = -z/(b-a)` for a point `z` left of the support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledVariable {
    pub eta: f64,
    pub z: f64,
}

impl ScaledVariable {
    pub fn new(z: f64, endpoints: &EndpointPair) -> Self {
        ScaledVariable {
            eta: -z / (endpoints.b() - endpoints.a()),
            z,
        }
    }
}

/// Consolidated three-factor form, evaluated at the context precision.
pub fn pn_full(
    z: f64,
    p: &WeightParams,
    n: u64,
    endpoints: &EndpointPair,
    ctx: &PrecisionContext,
) -> Result<Real, AsymptoticsError> {
    let (alpha, t) = (p.alpha(), p.t());
    let (a, b) = (endpoints.a(), endpoints.b());
    if !(z < a) {
        return Err(AsymptoticsError::Domain("z must lie left of the support"));
    }
    if t > 0.0 && z == 0.0 {
        return Err(AsymptoticsError::Domain("z = 0 is singular for t > 0"));
    }
    let mut ar = Arith::new(ctx.bits());
    let (za, zb, zz) = (ar.num(a), ar.num(b), ar.num(z));
    let d = &zb - &za;
    let u = (&za - &zz).sqrt();
    let v = (&zb - &zz).sqrt();
    let uv = &u * &v;
    let s = &u + &v;
    let two_pi = ar.pi().ldexp(1);

    let mut ln = -ar.ln(&(&two_pi * &d)).ldexp(-1);
    ln += &(&ar.ln(&(&s.square() / &d)) * n as f64);
    ln += &ar.ln(&(&(&v / &u).sqrt() + &(&u / &v).sqrt()));
    if alpha != 0.0 {
        let rab = (&za * &zb).sqrt();
        let num = &(&(&(&za * &zb).ldexp(1) - &(&(&za + &zb) * &zz)) + &(&rab * &uv).ldexp(1));
        ln -= &(&ar.ln(&(num / &s.square())) * (alpha / 2.0));
    }
    if t > 0.0 {
        let rab = (&za * &zb).sqrt();
        ln += &(&zz.recip() * (t / 2.0));
        // t√((z-a)(z-b))/(2z√(ab)) with √((z-a)(z-b)) = -uv
        ln -= &(&(&uv / &(&zz * &rab)) * (t / 2.0));
    }
    ln += &(&zz.ldexp(-1) + &uv.ldexp(-1));
    Ok(&ar.exp(&ln) * parity(n))
}

/// Simplified form for `z < 0`, as a signed double.
pub fn pn_simplified(z: f64, p: &WeightParams, n: u64, endpoints: &EndpointPair) -> Result<f64, AsymptoticsError> {
    Ok(pn_simplified_ln(z, p, n, endpoints)?.value())
}

/// `ln|𝒫_N(z)|` with its sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLn {
    pub negative: bool,
    pub ln_abs: f64,
}

impl SignedLn {
    pub fn value(self) -> f64 {
        let m = libm::exp(self.ln_abs);
        if self.negative {
            -m
        } else {
            m
        }
    }
}

pub fn pn_simplified_ln(z: f64, p: &WeightParams, n: u64, endpoints: &EndpointPair) -> Result<SignedLn, AsymptoticsError> {
    let (alpha, t) = (p.alpha(), p.t());
    if !(z < 0.0) {
        return Err(AsymptoticsError::Domain("simplified form needs z < 0"));
    }
    let d = endpoints.b() - endpoints.a();
    let mz = -z;
    let sd = libm::sqrt(d);
    let mut coef = (2.0 * n as f64 + alpha) / sd + sd / 2.0;
    let mut ln = -0.5 * libm::log(2.0 * PI) + (-alpha / 2.0 - 0.25) * libm::log(mz) - 0.25 * libm::log(d) + z / 2.0;
    if t > 0.0 {
        ln += t / (2.0 * z);
        coef -= sd * t / (2.0 * z * libm::sqrt(endpoints.a() * endpoints.b()));
    }
    ln += coef * libm::sqrt(mz);
    Ok(SignedLn {
        negative: n % 2 == 1,
        ln_abs: ln,
    })
}

/// Form in the scaled variable `η = -z/(b-a)`, for `z < 0`.
pub fn pn_eta_form(z: f64, p: &WeightParams, n: u64, endpoints: &EndpointPair) -> Result<f64, AsymptoticsError> {
    let (alpha, t) = (p.alpha(), p.t());
    if !(z < 0.0) {
        return Err(AsymptoticsError::Domain("eta form needs z < 0"));
    }
    let d = endpoints.b() - endpoints.a();
    let eta = ScaledVariable::new(z, endpoints).eta;
    let mut coef = d / 2.0;
    let mut ln = -0.25 * libm::log(eta) - 0.5 * libm::log(2.0 * PI * d) - alpha / 2.0 * libm::log(-z) + z / 2.0;
    if t > 0.0 {
        ln += t / (2.0 * z);
        coef -= d * t / (2.0 * z * libm::sqrt(endpoints.a() * endpoints.b()));
    }
    ln += (2.0 * n as f64 + 1.0 + alpha) * libm::log(libm::sqrt(eta) + libm::sqrt(eta + 1.0));
    ln += coef * libm::sqrt(eta * (eta + 1.0));
    Ok(parity(n) * libm::exp(ln))
}

/// Perron's classical Laguerre asymptotic `(-1)^N/(2√π) (-zN)^{-1/4} e^{z/2 + 2√(-zN)}`.
pub fn perron_form(z: f64, n: u64) -> Result<f64, AsymptoticsError> {
    if !(z < 0.0) || n == 0 {
        return Err(AsymptoticsError::Domain("Perron form needs z < 0 and N >= 1"));
    }
    let zn = -z * n as f64;
    Ok(parity(n) / (2.0 * libm::sqrt(PI)) * libm::pow(zn, -0.25) * libm::exp(z / 2.0 + 2.0 * libm::sqrt(zn)))
}
