//! Precision-parametric real arithmetic.
//!
//! Every numerical kernel in the crate is generic over [`Real`], which is
//! implemented for native `f64` and for the compensated double-double type
//! [`DoubleDouble`]. The two instantiations are selected at run time through
//! [`Precision`].

mod dd;
mod decimal;

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dd::DoubleDouble;
pub use decimal::{ratio_to_f64, DecimalLiteral};

/// Working precision of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    Extended,
}

impl Precision {
    pub fn unit_roundoff(self) -> f64 {
        match self {
            Precision::Double => <f64 as Real>::UNIT_ROUNDOFF,
            Precision::Extended => <DoubleDouble as Real>::UNIT_ROUNDOFF,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "double" | "f64" => Ok(Precision::Double),
            "extended" | "dd" | "double-double" | "quad" => Ok(Precision::Extended),
            other => Err(Error::invalid(format!("unknown precision {other:?}"))),
        }
    }
}

/// The real-number contract the numerical kernels are written against.
///
/// Implementations must be deterministic: identical inputs give bit-identical
/// outputs. NaN is never produced silently by the kernels; callers check
/// [`Real::is_finite`] at module boundaries.
pub trait Real:
    Copy
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    const PRECISION: Precision;
    /// Bound `u` such that each of `+ - * / sqrt` has relative error at most `4u`.
    const UNIT_ROUNDOFF: f64;
    /// Significant digits emitted by [`Real::to_decimal`] (at least).
    const DECIMAL_DIGITS: usize;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Exact for every `i64`.
    fn from_i64(n: i64) -> Self;

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn floor(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn is_finite(self) -> bool;

    /// `cos(2 pi x)`, with the argument reduction done in working precision.
    fn cos_turns(self) -> Self;

    /// Correctly rounded conversion of a validated decimal literal.
    fn from_decimal(lit: &DecimalLiteral) -> Result<Self>;
    /// Decimal rendering that parses back to the identical value.
    fn to_decimal(self) -> String;

    #[inline]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    #[inline]
    fn one() -> Self {
        Self::from_f64(1.0)
    }

    #[inline]
    fn epsilon() -> Self {
        Self::from_f64(Self::UNIT_ROUNDOFF)
    }

    #[inline]
    fn mul_f64(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }

    #[inline]
    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    #[inline]
    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    #[inline]
    fn powf(self, alpha: Self) -> Self {
        (alpha * self.ln()).exp()
    }

    /// Total order on finite values; panics on NaN, which the kernels never produce.
    #[inline]
    fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other).expect("NaN in comparison")
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Double;
    const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;
    const DECIMAL_DIGITS: usize = 17;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn floor(self) -> Self {
        f64::floor(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    fn cos_turns(self) -> Self {
        let (quadrant, frac) = reduce_turns(self);
        let (c, s) = if frac <= 0.5 {
            let t = frac * std::f64::consts::FRAC_PI_2;
            (t.cos(), t.sin())
        } else {
            let t = (1.0 - frac) * std::f64::consts::FRAC_PI_2;
            (t.sin(), t.cos())
        };
        rotate_quadrant(quadrant, c, s)
    }

    fn from_decimal(lit: &DecimalLiteral) -> Result<Self> {
        lit.to_f64()
    }

    fn to_decimal(self) -> String {
        format!("{:.16e}", self)
    }
}

/// Splits `x` (in turns) into a quadrant index and the fraction of that quadrant.
pub(crate) fn reduce_turns<R: Real>(x: R) -> (usize, R) {
    let r = x - x.floor();
    let r4 = r.mul_f64(4.0);
    let q = r4.floor();
    let quadrant = (q.to_f64() as i64).rem_euclid(4) as usize;
    (quadrant, r4 - q)
}

pub(crate) fn rotate_quadrant<R: Real>(quadrant: usize, c: R, s: R) -> R {
    match quadrant {
        0 => c,
        1 => -s,
        2 => -c,
        _ => s,
    }
}

/// Parses a decimal literal (`-1.234e-05`) at the precision of `R`.
pub fn parse_real<R: Real>(text: &str) -> Result<R> {
    let lit = DecimalLiteral::parse(text)?;
    R::from_decimal(&lit)
}

/// Plane rotation `(c, s, r)` with `c*x + s*y = r` and `-s*x + c*y = 0`.
///
/// Scaled by `max(|x|, |y|)` so neither the squares nor the norm can
/// overflow or underflow. `(0, 0)` maps to the identity rotation.
pub fn givens<R: Real>(x: R, y: R) -> (R, R, R) {
    let zero = R::zero();
    if y == zero {
        if x == zero {
            return (R::one(), zero, zero);
        }
        if x > zero {
            return (R::one(), zero, x);
        }
        return (-R::one(), zero, -x);
    }
    if x == zero {
        if y > zero {
            return (zero, R::one(), y);
        }
        return (zero, -R::one(), -y);
    }
    let scale = x.abs().max(y.abs());
    let xs = x / scale;
    let ys = y / scale;
    let r = scale * (xs * xs + ys * ys).sqrt();
    (x / r, y / r, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_rotation<R: Real>(x: f64, y: f64, want: (f64, f64, f64)) {
        let (c, s, r) = givens(R::from_f64(x), R::from_f64(y));
        let tol = 8.0 * R::UNIT_ROUNDOFF;
        assert!((c.to_f64() - want.0).abs() <= tol, "c = {c}");
        assert!((s.to_f64() - want.1).abs() <= tol, "s = {s}");
        assert!((r.to_f64() - want.2).abs() <= tol * want.2.max(1.0), "r = {r}");
    }

    #[test]
    fn givens_reference_cases() {
        for f in [check_rotation::<f64>, check_rotation::<DoubleDouble>] {
            f(1.0, 0.0, (1.0, 0.0, 1.0));
            f(0.0, 1.0, (0.0, 1.0, 1.0));
            f(3.0, 4.0, (0.6, 0.8, 5.0));
            f(0.0, 0.0, (1.0, 0.0, 0.0));
        }
    }

    #[test]
    fn givens_extreme_magnitudes() {
        let (c, s, r) = givens(1e300_f64, 1e300);
        assert!(r.is_finite());
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s - c).abs() < 1e-15);
        let (c, s, r) = givens(3e-310_f64, 4e-310);
        assert!((r - 5e-310).abs() <= 1e-323);
        assert!((c - 0.6).abs() < 1e-3 && (s - 0.8).abs() < 1e-3);
    }

    #[test]
    fn precision_constants() {
        assert!(Precision::Extended.unit_roundoff() <= 1e-30);
        assert!(Precision::Extended.unit_roundoff() < Precision::Double.unit_roundoff());
        assert!((Precision::Double.unit_roundoff() - 1.1102230246251565e-16).abs() < 1e-30);
    }

    #[test]
    fn parse_basic_literals() {
        assert_eq!(parse_real::<f64>("2.0").unwrap(), 2.0);
        assert_eq!(parse_real::<f64>("0.1").unwrap(), 0.1);
        assert_eq!(parse_real::<f64>("-1.234e-05").unwrap(), -1.234e-05);
        assert_eq!(parse_real::<DoubleDouble>("2.0").unwrap(), DoubleDouble::from_f64(2.0));
        for bad in ["", "abc", "1e", "--1", "inf", "NaN", "1.2.3", "1e5e5", "0x10"] {
            assert!(parse_real::<f64>(bad).is_err(), "{bad:?} accepted");
            assert!(parse_real::<DoubleDouble>(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn cos_turns_quadrants() {
        for (x, want) in [(0.0, 1.0), (0.25, 0.0), (0.5, -1.0), (0.75, 0.0), (1.0, 1.0), (-0.5, -1.0)] {
            assert!((x.cos_turns() - want).abs() < 1e-15, "cos_turns({x})");
            let dd = DoubleDouble::from_f64(x).cos_turns();
            assert!((dd - DoubleDouble::from_f64(want)).abs().to_f64() < 1e-31, "dd cos_turns({x})");
        }
        let third = DoubleDouble::from_i64(1) / DoubleDouble::from_i64(3);
        let c = third.cos_turns();
        assert!((c + DoubleDouble::from_f64(0.5)).abs().to_f64() < 1e-31);
    }
}
