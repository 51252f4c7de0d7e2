//! Exact decimal <-> binary conversion.
//!
//! Literals are parsed into an exact rational; conversion to `f64` rounds to
//! nearest-even, and a double-double takes `hi = RN(x)`, `lo = RN(x - hi)`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A syntactically valid decimal literal: `[+-]digits[.digits][(e|E)[+-]digits]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecimalLiteral {
    negative: bool,
    /// All significant digits with the decimal point removed.
    mantissa: BigUint,
    /// Value = mantissa * 10^exp10.
    exp10: i64,
}

impl DecimalLiteral {
    pub fn parse(text: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse { text: text.to_string(), reason: reason.to_string() };
        let s = text.trim();
        let bytes = s.as_bytes();
        let mut i = 0;
        let mut negative = false;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            negative = bytes[i] == b'-';
            i += 1;
        }
        let int_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let int_digits = &s[int_start..i];
        let mut frac_digits = "";
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            let f = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            frac_digits = &s[f..i];
        }
        if int_digits.is_empty() && frac_digits.is_empty() {
            return Err(fail("no digits"));
        }
        let mut exp10: i64 = 0;
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            i += 1;
            let mut exp_neg = false;
            if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                exp_neg = bytes[i] == b'-';
                i += 1;
            }
            let e = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if e == i {
                return Err(fail("empty exponent"));
            }
            let digits = &s[e..i];
            if digits.len() > 9 {
                return Err(fail("exponent out of range"));
            }
            exp10 = digits.parse::<i64>().map_err(|_| fail("bad exponent"))?;
            if exp_neg {
                exp10 = -exp10;
            }
        }
        if i != bytes.len() {
            return Err(fail("unexpected trailing characters"));
        }
        let all_digits = format!("{int_digits}{frac_digits}");
        let mantissa = BigUint::parse_bytes(all_digits.as_bytes(), 10).ok_or_else(|| fail("bad digits"))?;
        exp10 -= frac_digits.len() as i64;
        Ok(DecimalLiteral { negative, mantissa, exp10 })
    }

    pub fn to_rational(&self) -> BigRational {
        let sign = if self.negative { Sign::Minus } else { Sign::Plus };
        let m = BigInt::from_biguint(sign, self.mantissa.clone());
        if self.exp10 >= 0 {
            BigRational::from_integer(m * pow10(self.exp10 as u32))
        } else {
            BigRational::new(m, pow10((-self.exp10) as u32))
        }
    }

    fn magnitude_guard(&self) -> Result<()> {
        // Cheap rejection before building huge powers of ten.
        let digits = self.mantissa.to_string().len() as i64;
        let order = digits + self.exp10;
        if !self.mantissa.is_zero() && order > 330 {
            return Err(Error::Parse {
                text: self.to_string_lossy(),
                reason: "magnitude exceeds the floating-point range".into(),
            });
        }
        if !self.mantissa.is_zero() && order < -400 {
            return Ok(()); // rounds to zero
        }
        Ok(())
    }

    fn to_string_lossy(&self) -> String {
        format!("{}{}e{}", if self.negative { "-" } else { "" }, self.mantissa, self.exp10)
    }

    fn is_negligible(&self) -> bool {
        let digits = self.mantissa.to_string().len() as i64;
        self.mantissa.is_zero() || digits + self.exp10 < -400
    }

    pub fn to_f64(&self) -> Result<f64> {
        self.magnitude_guard()?;
        if self.is_negligible() {
            return Ok(if self.negative { -0.0 } else { 0.0 });
        }
        ratio_to_f64(&self.to_rational()).ok_or_else(|| Error::Parse {
            text: self.to_string_lossy(),
            reason: "magnitude exceeds the floating-point range".into(),
        })
    }

    pub fn to_double_double(&self) -> Result<(f64, f64)> {
        self.magnitude_guard()?;
        if self.is_negligible() {
            return Ok((if self.negative { -0.0 } else { 0.0 }, 0.0));
        }
        let exact = self.to_rational();
        let overflow = || Error::Parse {
            text: self.to_string_lossy(),
            reason: "magnitude exceeds the floating-point range".into(),
        };
        let hi = ratio_to_f64(&exact).ok_or_else(overflow)?;
        let rest = exact - exact_rational(hi);
        let lo = ratio_to_f64(&rest).ok_or_else(overflow)?;
        Ok((hi, lo))
    }
}

fn pow10(n: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), n as usize)
}

/// The exact rational value of a finite double.
pub fn exact_rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Correctly rounded (nearest, ties to even) conversion; `None` on overflow.
pub fn ratio_to_f64(r: &BigRational) -> Option<f64> {
    let num = r.numer();
    let den = r.denom();
    if num.is_zero() {
        return Some(0.0);
    }
    let negative = num.is_negative() != den.is_negative();
    let n = num.magnitude().clone();
    let d = den.magnitude().clone();
    // value ~ 2^e with e = bits(n) - bits(d) (within one).
    let e = n.bits() as i64 - d.bits() as i64;
    let k0 = e - 58;
    let (q0, rem) = if k0 >= 0 {
        n.div_rem(&(d.clone() << (k0 as usize)))
    } else {
        (n << ((-k0) as usize)).div_rem(&d)
    };
    let sticky = !rem.is_zero();
    let bl = q0.bits() as i64;
    let mut final_k = k0 + bl - 53;
    if final_k < -1074 {
        final_k = -1074;
    }
    let drop = final_k - k0;
    let (mut m, round_up) = if drop <= 0 {
        (q0.clone() << ((-drop) as usize), false)
    } else {
        let drop = drop as usize;
        let m = &q0 >> drop;
        let rest = &q0 - (&m << drop);
        let half = BigUint::one() << (drop - 1);
        let up = rest > half || (rest == half && (sticky || (&m & BigUint::one()) == BigUint::one()));
        (m, up)
    };
    if round_up {
        m += 1u32;
    }
    let m = m.to_u64()? as f64;
    let value = ldexp(m, final_k)?;
    Some(if negative { -value } else { value })
}

fn ldexp(m: f64, k: i64) -> Option<f64> {
    if m == 0.0 {
        return Some(0.0);
    }
    let mut out = m;
    let mut k = k;
    while k != 0 {
        let step = k.clamp(-1000, 1000);
        out *= 2f64.powi(step as i32);
        k -= step;
    }
    if out.is_finite() {
        Some(out)
    } else {
        None
    }
}

/// Renders `hi + lo` with at least `min_digits` significant digits, adding
/// digits until the text parses back to the identical pair.
pub fn format_double_double(hi: f64, lo: f64, min_digits: usize) -> String {
    if !hi.is_finite() {
        return format!("{hi}");
    }
    if hi == 0.0 {
        return if hi.is_sign_negative() { "-0e0".into() } else { "0e0".into() };
    }
    let exact = exact_rational(hi) + exact_rational(lo);
    let mut digits = min_digits;
    loop {
        let text = format_rational(&exact, digits, hi);
        if let Ok(lit) = DecimalLiteral::parse(&text) {
            if let Ok((h, l)) = lit.to_double_double() {
                if h.to_bits() == hi.to_bits() && l == lo {
                    return text;
                }
            }
        }
        if digits > 800 {
            return text;
        }
        digits += if digits < 48 { 2 } else { 16 };
    }
}

fn format_rational(value: &BigRational, digits: usize, approx: f64) -> String {
    let negative = value.is_negative();
    let abs = value.abs();
    let mut exp10 = approx.abs().log10().floor() as i64;
    loop {
        // D = round(|v| * 10^(digits - 1 - exp10))
        let shift = digits as i64 - 1 - exp10;
        let scaled = if shift >= 0 {
            &abs * BigRational::from_integer(pow10(shift as u32))
        } else {
            &abs / BigRational::from_integer(pow10((-shift) as u32))
        };
        let d = round_half_even(&scaled);
        let len = d.to_string().len();
        if len > digits {
            exp10 += 1;
            continue;
        }
        if len < digits {
            exp10 -= 1;
            continue;
        }
        let s = d.to_string();
        let (first, rest) = s.split_at(1);
        let sign = if negative { "-" } else { "" };
        return if rest.is_empty() {
            format!("{sign}{first}e{exp10}")
        } else {
            format!("{sign}{first}.{rest}e{exp10}")
        };
    }
}

fn round_half_even(x: &BigRational) -> BigInt {
    let floor = x.floor().to_integer();
    let frac = x - BigRational::from_integer(floor.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if frac > half || (frac == half && floor.is_odd()) {
        floor + 1
    } else {
        floor
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_to_f64_matches_std_parse() {
        for s in ["0.1", "1", "3.141592653589793238462643", "1e-310", "2.2250738585072014e-308",
                  "9007199254740993", "1.7976931348623157e308", "4.9e-324", "123456789e-20"] {
            let lit = DecimalLiteral::parse(s).unwrap();
            assert_eq!(lit.to_f64().unwrap(), s.parse::<f64>().unwrap(), "{s}");
        }
        assert!(DecimalLiteral::parse("1e400").unwrap().to_f64().is_err());
        assert_eq!(DecimalLiteral::parse("1e-500").unwrap().to_f64().unwrap(), 0.0);
    }

    #[test]
    fn literal_grammar() {
        assert!(DecimalLiteral::parse("-1.234e-05").is_ok());
        assert!(DecimalLiteral::parse("+7").is_ok());
        assert!(DecimalLiteral::parse("5.").is_ok());
        assert!(DecimalLiteral::parse(".5").is_ok());
        assert!(DecimalLiteral::parse("1E+3").is_ok());
        assert!(DecimalLiteral::parse("1,5").is_err());
        assert!(DecimalLiteral::parse("e5").is_err());
        assert!(DecimalLiteral::parse(" ").is_err());
    }

    #[test]
    fn formatting_uses_requested_digits() {
        let s = format_double_double(0.5, 0.0, 36);
        assert_eq!(s, "5.00000000000000000000000000000000000e-1");
        let s = format_double_double(-3.0, 0.0, 36);
        assert!(s.starts_with("-3.000"));
    }
}

impl std::fmt::Display for DecimalLiteral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sign = if self.negative { "-" } else { "" };
        if self.exp10 == 0 {
            write!(f, "{sign}{}", self.mantissa)
        } else {
            write!(f, "{sign}{}e{}", self.mantissa, self.exp10)
        }
    }
}
