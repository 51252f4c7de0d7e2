//! Double-double arithmetic built from error-free transformations.
//!
//! A value is the unevaluated sum `hi + lo` of two doubles with
//! `|lo| <= ulp(hi) / 2`. Products use a fused multiply-add when the target
//! supports one and Dekker's splitting otherwise; both give the exact error
//! term, so results are bit-identical across the two code paths.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use super::decimal::{self, DecimalLiteral};
use super::{reduce_turns, rotate_quadrant, Precision, Real};
use crate::error::Result;

#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

const PI_OVER_2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::FRAC_PI_2,
    lo: 6.123233995736766e-17,
};
const LN_2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.3190468138462996e-17,
};

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[cfg(target_feature = "fma")]
#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[cfg(not(target_feature = "fma"))]
#[inline(always)]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[cfg(not(target_feature = "fma"))]
#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

impl DoubleDouble {
    pub const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = DoubleDouble { hi: 1.0, lo: 0.0 };

    /// Builds a normalized value from an arbitrary pair.
    #[inline]
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        DoubleDouble { hi: h, lo: l }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (s, e) = quick_two_sum(s, e + self.lo);
        DoubleDouble { hi: s, lo: e }
    }

    #[inline]
    fn mul_by_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (p, e) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble { hi: p, lo: e }
    }

    #[inline]
    fn square(self) -> Self {
        self * self
    }

    fn exp_impl(self) -> Self {
        if self.hi > 709.8 {
            return DoubleDouble { hi: f64::INFINITY, lo: 0.0 };
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 {
            return Self::ONE;
        }
        // x = k ln2 + r with |r| <= ln2/2, then r is scaled by 2^-10 for the series.
        let k = (self.hi / LN_2.hi).round();
        let r = self - LN_2.mul_by_f64(k);
        let r = r.mul_by_f64(1.0 / 1024.0);
        let mut term = r;
        let mut sum = r;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = (term * r) / DoubleDouble::from_f64(n);
            sum += term;
            if term.hi.abs() <= 1e-36 * sum.hi.abs().max(1e-300) || n > 40.0 {
                break;
            }
        }
        // (1 + s)^(2^10) via (1 + s)^2 = 1 + (2s + s^2) to keep the small part exact.
        for _ in 0..10 {
            sum = sum.mul_by_f64(2.0) + sum.square();
        }
        let result = sum.add_f64(1.0);
        scale_pow2(result, k as i32)
    }

    fn ln_impl(self) -> Self {
        if !(self.hi > 0.0) {
            return DoubleDouble {
                hi: if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN },
                lo: 0.0,
            };
        }
        // Newton on exp(y) = x starting from the double-precision logarithm.
        let mut y = DoubleDouble::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp_impl() - Self::ONE;
        }
        y
    }

    fn sin_cos_small(t: Self) -> (Self, Self) {
        // |t| <= pi/4; Taylor series converge to below the double-double ulp within 30 terms.
        let t2 = t * t;
        let mut sin = t;
        let mut cos = Self::ONE;
        let mut sterm = t;
        let mut cterm = Self::ONE;
        let mut k = 1.0;
        loop {
            cterm = -(cterm * t2) / DoubleDouble::from_f64(k * (k + 1.0));
            sterm = -(sterm * t2) / DoubleDouble::from_f64((k + 1.0) * (k + 2.0));
            cos += cterm;
            sin += sterm;
            k += 2.0;
            if cterm.hi.abs() < 1e-36 && sterm.hi.abs() < 1e-36 || k > 60.0 {
                break;
            }
        }
        (sin, cos)
    }
}

fn scale_pow2(x: DoubleDouble, k: i32) -> DoubleDouble {
    let mut k = k;
    let mut out = x;
    while k != 0 {
        let step = k.clamp(-1000, 1000);
        let f = 2f64.powi(step);
        out = DoubleDouble { hi: out.hi * f, lo: out.lo * f };
        k -= step;
    }
    out
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl PartialOrd for DoubleDouble {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (s, e) = quick_two_sum(s, e + f);
        DoubleDouble { hi: s, lo: e }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (p, e) = quick_two_sum(p, e);
        DoubleDouble { hi: p, lo: e }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_by_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_by_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        DoubleDouble { hi: q1, lo: q2 }.add_f64(q3)
    }
}

macro_rules! assign_ops {
    ($($trait:ident $method:ident $op:tt),*) => {$(
        impl $trait for DoubleDouble {
            #[inline]
            fn $method(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    )*};
}

assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl Real for DoubleDouble {
    const PRECISION: Precision = Precision::Extended;
    // 2^-104: division carries up to ~10 * 2^-106 relative error.
    const UNIT_ROUNDOFF: f64 = 4.930380657631324e-32;
    const DECIMAL_DIGITS: usize = 36;

    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn from_i64(n: i64) -> Self {
        let hi = n as f64;
        // hi is within 2^10 of n, so the correction is exact.
        let lo = (n as i128 - hi as i128) as f64;
        DoubleDouble::from_parts(hi, lo)
    }

    #[inline]
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from_f64(self.hi.sqrt());
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let r = (self - DoubleDouble { hi: p, lo: e }).hi;
        let (h, l) = quick_two_sum(s, r / (2.0 * s));
        DoubleDouble { hi: h, lo: l }
    }

    fn floor(self) -> Self {
        let fh = self.hi.floor();
        if fh == self.hi {
            let (h, l) = quick_two_sum(fh, self.lo.floor());
            DoubleDouble { hi: h, lo: l }
        } else {
            DoubleDouble { hi: fh, lo: 0.0 }
        }
    }

    fn exp(self) -> Self {
        self.exp_impl()
    }

    fn ln(self) -> Self {
        self.ln_impl()
    }

    #[inline]
    fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    fn cos_turns(self) -> Self {
        let (quadrant, frac) = reduce_turns(self);
        let half = DoubleDouble::from_f64(0.5);
        let (c, s) = if frac <= half {
            let (s, c) = Self::sin_cos_small(frac * PI_OVER_2);
            (c, s)
        } else {
            let (s, c) = Self::sin_cos_small((Self::ONE - frac) * PI_OVER_2);
            (s, c)
        };
        rotate_quadrant(quadrant, c, s)
    }

    fn from_decimal(lit: &DecimalLiteral) -> Result<Self> {
        let (hi, lo) = lit.to_double_double()?;
        Ok(DoubleDouble { hi, lo })
    }

    fn to_decimal(self) -> String {
        decimal::format_double_double(self.hi, self.lo, Self::DECIMAL_DIGITS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{Signed, Zero};
    use proptest::prelude::*;

    use crate::realnum::decimal::exact_rational;
    use crate::realnum::ratio_to_f64;

    fn exact(x: DoubleDouble) -> BigRational {
        exact_rational(x.hi) + exact_rational(x.lo)
    }

    fn to_f64(r: &BigRational) -> f64 {
        ratio_to_f64(r).unwrap()
    }

    fn rel_err(got: DoubleDouble, want: &BigRational) -> f64 {
        let diff = exact(got) - want;
        if want.is_zero() {
            return to_f64(&diff).abs();
        }
        to_f64(&(diff / want)).abs()
    }

    fn dd(hi: f64, lo_frac: f64) -> DoubleDouble {
        DoubleDouble::from_parts(hi, hi * lo_frac * 1e-17)
    }

    fn finite_dd() -> impl Strategy<Value = DoubleDouble> {
        (-1e6f64..1e6, -1.0f64..1.0, -40i32..40)
            .prop_map(|(m, f, e)| dd(m * 2f64.powi(e), f))
    }

    const BOUND: f64 = 4.0 * <DoubleDouble as Real>::UNIT_ROUNDOFF;

    proptest! {
        #[test]
        fn arithmetic_error_bounds(a in finite_dd(), b in finite_dd()) {
            let (ea, eb) = (exact(a), exact(b));
            prop_assert!(rel_err(a + b, &(&ea + &eb)) <= BOUND || (a + b).abs().to_f64() < 1e-280);
            prop_assert!(rel_err(a - b, &(&ea - &eb)) <= BOUND || (a - b).abs().to_f64() < 1e-280);
            prop_assert!(rel_err(a * b, &(&ea * &eb)) <= BOUND);
            if !eb.is_zero() {
                prop_assert!(rel_err(a / b, &(&ea / &eb)) <= BOUND);
            }
        }

        #[test]
        fn sqrt_error_bound(a in finite_dd()) {
            let a = a.abs();
            prop_assume!(a.hi > 0.0);
            let s = a.sqrt();
            // sqrt(a) = s(1 + d)  =>  s^2 = a(1 + d)^2
            let sq = exact(s) * exact(s);
            let rel = to_f64(&((sq - exact(a)) / exact(a))).abs();
            prop_assert!(rel / 2.0 <= BOUND, "rel {}", rel);
        }

        #[test]
        fn reproduces_double_results(a in -1e8f64..1e8, b in -1e8f64..1e8) {
            // exact results that are representable in f64
            let (x, y) = (a.round(), b.round());
            let s = DoubleDouble::from_f64(x) + DoubleDouble::from_f64(y);
            prop_assert_eq!(s.to_f64(), x + y);
            let p = DoubleDouble::from_f64(x) * DoubleDouble::from_f64(y);
            if (x * y).abs() < 2f64.powi(53) {
                prop_assert_eq!(p.to_f64(), x * y);
            }
            let h = DoubleDouble::from_f64(x * 0.5);
            prop_assert_eq!(h.to_f64(), x * 0.5);
        }

        #[test]
        fn decimal_round_trip(a in finite_dd()) {
            let text = a.to_decimal();
            let back: DoubleDouble = crate::realnum::parse_real(&text).unwrap();
            prop_assert_eq!(back.hi.to_bits(), a.hi.to_bits());
            prop_assert_eq!(back.lo.to_bits(), a.lo.to_bits());
        }

        #[test]
        fn f64_decimal_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let back: f64 = crate::realnum::parse_real(&x.to_decimal()).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn round_trip_with_tiny_low_word() {
        let x = DoubleDouble::from_parts(1.0, 1e-40);
        let back: DoubleDouble = crate::realnum::parse_real(&x.to_decimal()).unwrap();
        assert_eq!(back, x);
        assert!(x.to_decimal().len() > 36);
    }

    #[test]
    fn tenth_is_accurate() {
        let x: DoubleDouble = crate::realnum::parse_real("0.1").unwrap();
        let want = BigRational::new(BigInt::from(1), BigInt::from(10));
        assert!(to_f64(&(exact(x) - want).abs()) < 1e-31);
        let y: f64 = crate::realnum::parse_real("0.1").unwrap();
        assert_eq!(y, 0.1);
    }

    #[test]
    fn exp_ln_accuracy() {
        let e = DoubleDouble::ONE.exp();
        let want: DoubleDouble =
            crate::realnum::parse_real("2.718281828459045235360287471352662498").unwrap();
        assert!((e - want).abs().to_f64() < 1e-31, "{e:?}");
        for x in [1e-20, 0.3, 1.0, 2.5, 17.0, 1e10] {
            let v = DoubleDouble::from_f64(x);
            let back = v.ln().exp();
            assert!(((back - v) / v).abs().to_f64() < 1e-30, "x = {x}");
        }
        let l2 = DoubleDouble::from_f64(2.0).ln();
        assert!((l2 - LN_2).abs().to_f64() < 1e-32);
        let big = DoubleDouble::from_f64(-50.0).exp();
        assert!(big.hi > 0.0 && (big.hi - (-50f64).exp()).abs() < 1e-35);
    }

    #[test]
    fn rational_helpers_sign() {
        let r = exact_rational(-0.75);
        assert!(r.is_negative());
        assert_eq!(to_f64(&r), -0.75);
    }
}
