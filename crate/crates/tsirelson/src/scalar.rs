//! Exact rational scalars: parsing, formatting, and dyadic rounding.
//!
//! All scalar arithmetic in this crate is performed on arbitrary-precision
//! rationals. Scalars cross serialization boundaries as `"p/q"` strings (a
//! bare `"p"` is accepted on input and means `p/1`).

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::RatInterval;

/// Arbitrary-precision rational number, always kept in reduced form with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Parse a rational from `"p/q"` or `"p"` form. Whitespace around either
/// component is accepted; the result is reduced.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let body = s.trim();
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (body, "1"),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| Error::InvalidRational(s.to_string(), "numerator is not an integer".into()))?;
    let q: BigInt = den
        .parse()
        .map_err(|_| Error::InvalidRational(s.to_string(), "denominator is not an integer".into()))?;
    if q.is_zero() {
        return Err(Error::InvalidRational(s.to_string(), "denominator is zero".into()));
    }
    Ok(Rational::new(p, q))
}

/// Format a rational as `"p/q"`, always with an explicit denominator, so that
/// `1` renders as `"1/1"`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Shorthand for building a small rational in tests and internal tables.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Check that a coefficient lies in `(0, 1]`, the only legal range for the
/// weights `theta_k`.
pub fn require_unit_coefficient(r: &Rational, what: &str) -> Result<()> {
    if r.is_positive() && *r <= Rational::one() {
        Ok(())
    } else {
        Err(Error::CoefficientOutOfRange(format!("{what} = {}", format_rational(r))))
    }
}

/// A scalar that is either known exactly or certified to lie in a rational
/// interval. Norms of spaces with irrational coefficient sequences are
/// reported as enclosures; everything else stays exact.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rational),
    Enclosure(RatInterval),
}

impl Value {
    /// Lower endpoint (the value itself when exact).
    pub fn lo(&self) -> &Rational {
        match self {
            Value::Exact(r) => r,
            Value::Enclosure(i) => &i.lo,
        }
    }

    /// Upper endpoint (the value itself when exact).
    pub fn hi(&self) -> &Rational {
        match self {
            Value::Exact(r) => r,
            Value::Enclosure(i) => &i.hi,
        }
    }

    /// Width of the enclosure; zero for exact values.
    pub fn width(&self) -> Rational {
        self.hi() - self.lo()
    }

    /// The exact value, if this is one.
    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Enclosure(_) => None,
        }
    }

    /// True when the (possibly degenerate) enclosure contains `r`.
    pub fn contains(&self, r: &Rational) -> bool {
        self.lo() <= r && r <= self.hi()
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{}", format_rational(r)),
            Value::Enclosure(i) => {
                write!(f, "[{}, {}]", decimal_floor(&i.lo, 9), decimal_ceil(&i.hi, 9))
            }
        }
    }
}

impl serde::Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            Value::Exact(r) => {
                let mut st = s.serialize_struct("Value", 1)?;
                st.serialize_field("exact", &format_rational(r))?;
                st.end()
            }
            Value::Enclosure(i) => {
                let mut st = s.serialize_struct("Value", 2)?;
                st.serialize_field("lo", &format_rational(&i.lo))?;
                st.serialize_field("hi", &format_rational(&i.hi))?;
                st.end()
            }
        }
    }
}

/// Serde adapter serializing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for optional rationals as `"p/q"` strings.
pub mod serde_rational_opt {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        match text {
            Some(t) => parse_rational(&t).map(Some).map_err(serde::de::Error::custom),
            None => Ok(None),
        }
    }
}

/// Round `r` down to a multiple of `2^-bits`.
pub fn round_down_dyadic(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::from(BigUint::one() << bits);
    let scaled = (r * &scale).floor();
    scaled / scale
}

/// Round `r` up to a multiple of `2^-bits`.
pub fn round_up_dyadic(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::from(BigUint::one() << bits);
    let scaled = (r * &scale).ceil();
    scaled / scale
}

fn fixed_point_decimal(scaled: &BigInt, digits: u32) -> String {
    let sign = if scaled.is_negative() { "-" } else { "" };
    let mag = scaled.magnitude().to_string();
    let width = digits as usize + 1;
    let mag = if mag.len() < width { format!("{mag:0>width$}") } else { mag };
    if digits == 0 {
        return format!("{sign}{mag}");
    }
    let (int_part, frac_part) = mag.split_at(mag.len() - digits as usize);
    format!("{sign}{int_part}.{frac_part}")
}

/// Render a rational as a decimal with `digits` places, rounded toward
/// negative infinity — safe as the lower endpoint of an enclosure.
pub fn decimal_floor(r: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    fixed_point_decimal(&(r * &scale).floor().to_integer(), digits)
}

/// Render a rational as a decimal with `digits` places, rounded toward
/// positive infinity — safe as the upper endpoint of an enclosure.
pub fn decimal_ceil(r: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    fixed_point_decimal(&(r * &scale).ceil().to_integer(), digits)
}

/// Render a rational as a decimal string with `digits` places, truncated
/// toward zero. Used for human-readable report fields only.
pub fn decimal_string(r: &Rational, digits: u32) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let a = r.abs();
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (&a * &scale).floor().to_integer();
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    let frac_str = format!("{:0>width$}", frac_part.to_string(), width = digits as usize);
    format!("{sign}{int_part}.{frac_str}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_bare_integer() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("2").unwrap(), ratio(2, 1));
        assert_eq!(parse_rational(" -7/2 ").unwrap(), ratio(-7, 2));
    }

    #[test]
    fn parsing_reduces_and_normalizes_sign() {
        assert_eq!(parse_rational("6/8").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("1/-2").unwrap(), ratio(-1, 2));
        assert_eq!(format_rational(&parse_rational("1/-2").unwrap()), "-1/2");
    }

    #[test]
    fn rejects_zero_denominator_and_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1/2/3").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_with_explicit_denominator() {
        assert_eq!(format_rational(&ratio(1, 1)), "1/1");
        assert_eq!(format_rational(&ratio(-3, 2)), "-3/2");
    }

    #[test]
    fn unit_coefficient_range_is_half_open() {
        assert!(require_unit_coefficient(&ratio(1, 1), "theta").is_ok());
        assert!(require_unit_coefficient(&ratio(1, 1000), "theta").is_ok());
        assert!(require_unit_coefficient(&ratio(0, 1), "theta").is_err());
        assert!(require_unit_coefficient(&ratio(3, 2), "theta").is_err());
        assert!(require_unit_coefficient(&ratio(-1, 2), "theta").is_err());
    }

    #[test]
    fn dyadic_rounding_brackets_the_value() {
        let r = ratio(1, 3);
        let lo = round_down_dyadic(&r, 10);
        let hi = round_up_dyadic(&r, 10);
        assert!(lo < r && r < hi);
        assert_eq!(&hi - &lo, ratio(1, 1024));
        // Dyadic values round to themselves.
        let d = ratio(5, 8);
        assert_eq!(round_down_dyadic(&d, 10), d);
        assert_eq!(round_up_dyadic(&d, 10), d);
    }

    #[test]
    fn decimal_rendering_truncates() {
        assert_eq!(decimal_string(&ratio(1, 3), 4), "0.3333");
        assert_eq!(decimal_string(&ratio(-5, 2), 2), "-2.50");
        assert_eq!(decimal_string(&ratio(2, 1), 3), "2.000");
    }
}
