use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim())
            .map_err(|_| Error::InvalidArgument(format!("bad numerator in {s:?}")))?;
        let d = BigInt::from_str(d.trim())
            .map_err(|_| Error::InvalidArgument(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in {s:?}")));
        }
        Ok(Rational::new(n, d))
    } else {
        let n = BigInt::from_str(t)
            .map_err(|_| Error::InvalidArgument(format!("not a rational: {s:?}")))?;
        Ok(Rational::from_integer(n))
    }
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `r * 10^places`, rounded half to even.
fn round_scaled(r: &Rational, places: u32) -> BigInt {
    let scaled = r * Rational::from_integer(BigInt::from(10u32).pow(places));
    let fl = scaled.floor();
    let frac = &scaled - &fl;
    let half = rat(1, 2);
    let base = fl.to_integer();
    if frac > half || (frac == half && base.is_odd()) {
        base + 1
    } else {
        base
    }
}

/// Decimal rendering with `places` fractional digits, round-half-even.
pub fn decimal(r: &Rational, places: u32) -> String {
    render_scaled(&round_scaled(r, places), places)
}

pub(crate) fn decimal_key(r: &Rational, places: u32) -> BigInt {
    round_scaled(r, places)
}

pub(crate) fn render_scaled(n: &BigInt, places: u32) -> String {
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let p = places as usize;
    let padded = if digits.len() <= p {
        format!("{}{}", "0".repeat(p + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (ip, fp) = padded.split_at(padded.len() - p);
    let sign = if neg { "-" } else { "" };
    if p == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{fp}")
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Floor of a rational as an integer.
pub fn floor_int(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -4 ").unwrap(), int(-4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(decimal(&rat(1, 8), 2), "0.12");
        assert_eq!(decimal(&rat(3, 8), 2), "0.38");
        assert_eq!(decimal(&rat(-1, 8), 2), "-0.12");
        assert_eq!(decimal(&rat(2, 3), 12), "0.666666666667");
        assert_eq!(decimal(&int(1), 12), "1.000000000000");
        assert_eq!(decimal(&rat(-1, 3), 3), "-0.333");
    }

    #[test]
    fn formats_exact() {
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(-3, 4)), "-3/4");
    }
}
