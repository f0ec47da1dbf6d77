//! Binary multiprecision reals.
//!
//! [`Real`] is a thin owned wrapper over an `astro_float::BigFloat` with
//! arithmetic operators. Binary operators round to the larger of the two
//! operand precisions, so a computation started at `bits` stays at `bits`
//! without threading the precision through every expression. Functions that
//! need cached constants (`exp`, `ln`, `pi`, trigonometry) live on [`Arith`],
//! which owns the constants cache and the working precision.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;
/// Extra width for radix conversion, which is not correctly rounded.
const GUARD_BITS: usize = 64;
// e^x underflows the i32 binary exponent once x < -2^31 ln 2; flush well before
const EXP_FLUSH_LOG2: f64 = 30.0;

/// Multiprecision binary floating-point number.
#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    // the backend stores zero without a mantissa, so the width is kept here
    bits: usize,
}

impl Real {
    pub fn from_f64(v: f64, bits: usize) -> Self {
        Real::wrap(BigFloat::from_f64(v, bits), bits)
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        Real::wrap(BigFloat::from_i64(v, bits), bits)
    }

    fn wrap(v: BigFloat, bits: usize) -> Self {
        Real { v, bits }
    }

    pub fn zero(bits: usize) -> Self {
        Real::wrap(BigFloat::new(bits), bits)
    }

    pub fn one(bits: usize) -> Self {
        Real::from_i64(1, bits)
    }

    /// Mantissa width in bits (rounded up to the word size by the backend).
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Copy rounded to `bits` of mantissa.
    pub fn with_bits(&self, bits: usize) -> Self {
        let mut v = self.v.clone();
        if v.set_precision(bits, RM).is_err() {
            return Real::wrap(BigFloat::nan(None), bits);
        }
        Real::wrap(v, bits)
    }

    pub fn is_finite(&self) -> bool {
        !(self.v.is_nan() || self.v.is_inf())
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.is_finite() && !self.v.is_zero() && self.v.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.is_finite() && !self.v.is_zero() && self.v.is_negative()
    }

    pub fn abs(&self) -> Self {
        Real::wrap(self.v.abs(), self.bits)
    }

    pub fn sqrt(&self) -> Self {
        Real::wrap(self.v.sqrt(self.bits(), RM), self.bits())
    }

    pub fn cbrt(&self) -> Self {
        Real::wrap(self.v.cbrt(self.bits(), RM), self.bits())
    }

    pub fn recip(&self) -> Self {
        Real::wrap(self.v.reciprocal(self.bits(), RM), self.bits())
    }

    pub fn powi(&self, n: usize) -> Self {
        Real::wrap(self.v.powi(n, self.bits(), RM), self.bits())
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Multiply by `2^k` exactly.
    pub fn ldexp(&self, k: i32) -> Self {
        let mut v = self.v.clone();
        if let Some(e) = v.exponent() {
            if !v.is_zero() {
                v.set_exponent(e.saturating_add(k));
            }
        }
        Real::wrap(v, self.bits)
    }

    /// Nearest `f64`; saturates to ±inf or 0 outside the double range.
    pub fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf() {
            return if self.v.is_positive() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        match self.v.as_raw_parts() {
            None => f64::NAN,
            Some((words, _, sign, e, _)) => {
                let top = match words.last() {
                    Some(&w) if w != 0 => w,
                    _ => return 0.0,
                };
                let v = libm::ldexp(top as f64, (e as i64 - 64).clamp(-2000, 2000) as i32);
                if sign == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// `log2 |self|` as a double, valid far outside the `f64` exponent range.
    pub fn log2_abs(&self) -> f64 {
        match self.v.as_raw_parts() {
            Some((words, _, _, e, _)) => match words.last() {
                Some(&w) if w != 0 => e as f64 + libm::log2(w as f64) - 64.0,
                _ => f64::NEG_INFINITY,
            },
            None => f64::NAN,
        }
    }

    /// Binary exponent `e` with `self = m * 2^e`, `0.5 <= |m| < 1`.
    pub fn exponent(&self) -> Option<i32> {
        if self.v.is_zero() {
            return None;
        }
        self.v.exponent()
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e} @{}b)", self.to_f64(), self.bits())
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.partial_cmp(&other.v)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(BigFloat::neg(&self.v), self.bits)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(BigFloat::neg(&self.v), self.bits)
    }
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.bits().max(rhs.bits());
                Real::wrap(self.v.$inner(&rhs.v, p, RM), p)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
        impl $tr<f64> for &Real {
            type Output = Real;
            fn $method(self, rhs: f64) -> Real {
                let p = self.bits();
                Real::wrap(self.v.$inner(&BigFloat::from_f64(rhs, p), p, RM), p)
            }
        }
        impl $tr<f64> for Real {
            type Output = Real;
            fn $method(self, rhs: f64) -> Real {
                (&self).$method(rhs)
            }
        }
    };
}

real_binop!(Add, add, add);
real_binop!(Sub, sub, sub);
real_binop!(Mul, mul, mul);
real_binop!(Div, div, div);

impl AddAssign<&Real> for Real {
    fn add_assign(&mut self, rhs: &Real) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Real> for Real {
    fn add_assign(&mut self, rhs: Real) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Real> for Real {
    fn sub_assign(&mut self, rhs: &Real) {
        *self = &*self - rhs;
    }
}

impl SubAssign<Real> for Real {
    fn sub_assign(&mut self, rhs: Real) {
        *self = &*self - &rhs;
    }
}

impl MulAssign<&Real> for Real {
    fn mul_assign(&mut self, rhs: &Real) {
        *self = &*self * rhs;
    }
}

/// Working precision plus the constants cache needed by transcendental
/// functions. Not `Sync`; create one per thread of work.
pub struct Arith {
    bits: usize,
    cc: Consts,
}

impl fmt::Debug for Arith {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Arith").field("bits", &self.bits).finish()
    }
}

impl Arith {
    pub fn new(bits: usize) -> Self {
        Arith {
            bits,
            cc: Consts::new().expect("constants cache allocation"),
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn num(&self, v: f64) -> Real {
        Real::from_f64(v, self.bits)
    }

    pub fn int(&self, v: i64) -> Real {
        Real::from_i64(v, self.bits)
    }

    pub fn zero(&self) -> Real {
        Real::zero(self.bits)
    }

    pub fn one(&self) -> Real {
        Real::one(self.bits)
    }

    pub fn pi(&mut self) -> Real {
        Real::wrap(self.cc.pi(self.bits, RM), self.bits)
    }

    /// `e^x`; flushes to zero below the backend exponent range.
    pub fn exp(&mut self, x: &Real) -> Real {
        if x.is_negative() && x.log2_abs() > EXP_FLUSH_LOG2 {
            return self.zero();
        }
        Real::wrap(x.v.exp(self.bits, RM, &mut self.cc), self.bits)
    }

    pub fn ln(&mut self, x: &Real) -> Real {
        Real::wrap(x.v.ln(self.bits, RM, &mut self.cc), self.bits)
    }

    pub fn sqrt(&self, x: &Real) -> Real {
        Real::wrap(x.v.sqrt(self.bits, RM), self.bits)
    }

    pub fn sin(&mut self, x: &Real) -> Real {
        Real::wrap(x.v.sin(self.bits, RM, &mut self.cc), self.bits)
    }

    pub fn cos(&mut self, x: &Real) -> Real {
        Real::wrap(x.v.cos(self.bits, RM, &mut self.cc), self.bits)
    }

    pub fn atan(&mut self, x: &Real) -> Real {
        Real::wrap(x.v.atan(self.bits, RM, &mut self.cc), self.bits)
    }

    /// `x^y` for `x > 0`.
    pub fn pow(&mut self, x: &Real, y: &Real) -> Real {
        let l = self.ln(x);
        self.exp(&(&l * y))
    }

    /// Round-to-nearest decimal rendering with exactly `digits` significant
    /// digits, formatted as `d.ddd…e<exp>`. Deterministic for a given value.
    pub fn to_decimal(&mut self, x: &Real, digits: usize) -> String {
        let digits = digits.max(1);
        if x.is_zero() {
            let mut s = String::from("0");
            if digits > 1 {
                s.push('.');
                s.extend(core::iter::repeat('0').take(digits - 1));
            }
            s.push_str("e0");
            return s;
        }
        if !x.is_finite() {
            return String::from("NaN");
        }
        let (sign, mut m, e) = x
            .with_bits(x.bits + GUARD_BITS)
            .v
            .convert_to_radix(Radix::Dec, RoundingMode::None, &mut self.cc)
            .expect("finite value converts to decimal");
        // strip leading zeros the backend may emit
        let lead = m.iter().take_while(|&&d| d == 0).count();
        m.drain(..lead);
        // value = 0.m * 10^e
        let mut exp10 = e as i64 - 1;
        let mut out: Vec<u8> = m.iter().take(digits).copied().collect();
        while out.len() < digits {
            out.push(0);
        }
        if m.len() > digits {
            let rest = &m[digits..];
            let first = rest[0];
            let tail_nonzero = rest[1..].iter().any(|&d| d != 0);
            let round_up = first > 5
                || (first == 5 && (tail_nonzero || out.last().map_or(false, |&d| d % 2 == 1)));
            if round_up {
                let mut i = out.len();
                loop {
                    if i == 0 {
                        out.insert(0, 1);
                        out.pop();
                        exp10 += 1;
                        break;
                    }
                    i -= 1;
                    if out[i] == 9 {
                        out[i] = 0;
                    } else {
                        out[i] += 1;
                        break;
                    }
                }
            }
        }
        let mut s = String::with_capacity(digits + 16);
        if sign == Sign::Neg {
            s.push('-');
        }
        s.push((b'0' + out[0]) as char);
        if digits > 1 {
            s.push('.');
            for &d in &out[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push('e');
        s.push_str(&alloc::format!("{}", exp10));
        s
    }

    /// Parse a decimal string (`123`, `-1.5e-7`, …) at the working precision.
    pub fn parse_decimal(&mut self, s: &str) -> Option<Real> {
        let v = BigFloat::parse(s.trim(), Radix::Dec, self.bits + GUARD_BITS, RM, &mut self.cc);
        if v.is_nan() || v.is_inf() {
            None
        } else {
            let stored = self.bits.div_ceil(64) * 64;
            let mut r = Real::wrap(v, self.bits + GUARD_BITS).with_bits(stored);
            r.bits = self.bits;
            Some(r)
        }
    }
}

/// Relative difference `|x - y| / |y|` as a double (`|x - y|` when `y == 0`).
pub fn rel_diff(x: &Real, y: &Real) -> f64 {
    let d = (x - y).abs();
    if y.is_zero() {
        return d.to_f64();
    }
    libm::exp2(d.log2_abs() - y.log2_abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_zero_results_stay_usable() {
        let mut ar = Arith::new(256);
        let l = ar.ln(&ar.one());
        assert!(l.is_zero());
        assert_eq!((&(&l * 2.0) - 1.0).to_f64(), -1.0);
        assert_eq!((&l + &ar.num(3.0)).to_f64(), 3.0);
    }

    #[test]
    fn f64_roundtrip() {
        for v in [1.0, -2.5, 3.0e-300, 7.25e200, 0.1] {
            assert_eq!(Real::from_f64(v, 128).to_f64(), v);
        }
        assert_eq!(Real::zero(64).to_f64(), 0.0);
    }

    #[test]
    fn log2_of_huge_values() {
        let mut ar = Arith::new(256);
        let x = ar.exp(&ar.num(5000.0));
        let l = x.log2_abs();
        assert!((l - 5000.0 / core::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn precision_follows_operands() {
        let a = Real::from_f64(1.0, 512);
        let b = Real::from_f64(3.0, 128);
        let q = &a / &b;
        assert!(q.bits() >= 512);
    }

    #[test]
    fn decimal_rendering_rounds() {
        let mut ar = Arith::new(128);
        let x = ar.num(720.0);
        assert_eq!(ar.to_decimal(&x, 5), "7.2000e2");
        let third = ar.one() / ar.num(3.0);
        assert_eq!(ar.to_decimal(&third, 4), "3.333e-1");
        let two_thirds = ar.num(2.0) / ar.num(3.0);
        assert_eq!(ar.to_decimal(&two_thirds, 4), "6.667e-1");
        let nines = ar.num(9.9996);
        assert_eq!(ar.to_decimal(&nines, 4), "1.000e1");
        assert_eq!(ar.to_decimal(&ar.num(-0.015625), 3), "-1.56e-2");
        assert_eq!(ar.to_decimal(&ar.zero(), 3), "0.00e0");
    }

    #[test]
    fn decimal_parse_roundtrip() {
        let mut ar = Arith::new(256);
        let x = ar.pi();
        let s = ar.to_decimal(&x, 78);
        let y = ar.parse_decimal(&s).unwrap();
        assert!(rel_diff(&x, &y) < 1e-76);
        assert_eq!(ar.to_decimal(&y, 78), s);
    }

    #[test]
    fn ldexp_scales_exactly() {
        let x = Real::from_f64(3.0, 128);
        assert_eq!(x.ldexp(-3).to_f64(), 0.375);
    }

    #[test]
    fn decimal_roundtrip_at_odd_widths() {
        for bits in [64usize, 100, 300, 1000] {
            let mut ar = Arith::new(bits);
            let digits = (bits * 302).div_ceil(1000).max((bits.div_ceil(64) * 64 * 30103).div_ceil(100_000) + 1);
            let three = Real::from_f64(3.0, bits);
            for i in 1..60 {
                let v = &Real::from_f64(1.0 + i as f64 * 0.37, bits).sqrt() / &three;
                let s = ar.to_decimal(&v, digits);
                assert!(ar.parse_decimal(&s).unwrap() == v, "bits={bits} {s}");
            }
        }
    }
}
