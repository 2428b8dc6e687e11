//! Numeric backends.
//!
//! Every solver in the crate is generic over [`Scalar`], which has two
//! implementations: `f64` (comparisons use a 1e-9 tolerance) and
//! [`Rational`] (`i128` ratios, exact comparisons, checked arithmetic).
//! Rational overflow surfaces as [`NumericError::Overflow`] instead of
//! wrapping.

use std::fmt;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("rational arithmetic overflowed 128-bit integers")]
    Overflow,
    #[error("value has no exact rational representation")]
    NotExact,
}

/// Arithmetic used by the LP solver and the curvature code.
pub trait Scalar:
    Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// True for exact arithmetic; tolerances are zero.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Pick the representation matching this backend out of a stored number.
    fn from_number(n: &Number) -> Result<Self, NumericError>;

    fn add(&self, rhs: &Self) -> Result<Self, NumericError>;
    fn sub(&self, rhs: &Self) -> Result<Self, NumericError>;
    fn mul(&self, rhs: &Self) -> Result<Self, NumericError>;
    fn div(&self, rhs: &Self) -> Result<Self, NumericError>;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;

    /// Comparison slack: 1e-9 for floats, 0 for rationals.
    fn tolerance() -> Self;

    /// Snap round-off noise to zero. Identity for exact arithmetic.
    fn clean(self) -> Self {
        self
    }

    fn is_positive(&self) -> bool {
        *self > Self::tolerance()
    }

    fn is_negative(&self) -> bool {
        *self < Self::tolerance().neg()
    }

    fn is_negligible(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    fn is_exact_zero(&self) -> bool;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_number(n: &Number) -> Result<Self, NumericError> {
        Ok(n.value())
    }
    fn add(&self, rhs: &Self) -> Result<Self, NumericError> {
        Ok(self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Result<Self, NumericError> {
        Ok(self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self, NumericError> {
        Ok(self * rhs)
    }
    fn div(&self, rhs: &Self) -> Result<Self, NumericError> {
        Ok(self / rhs)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn tolerance() -> Self {
        1e-9
    }
    fn clean(self) -> Self {
        if self.abs() < 1e-13 {
            0.0
        } else {
            self
        }
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <Ratio<i128> as Zero>::zero()
    }
    fn one() -> Self {
        <Ratio<i128> as One>::one()
    }
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
    fn from_number(n: &Number) -> Result<Self, NumericError> {
        n.exact().ok_or(NumericError::NotExact)
    }
    fn add(&self, rhs: &Self) -> Result<Self, NumericError> {
        self.checked_add(rhs).ok_or(NumericError::Overflow)
    }
    fn sub(&self, rhs: &Self) -> Result<Self, NumericError> {
        self.checked_sub(rhs).ok_or(NumericError::Overflow)
    }
    fn mul(&self, rhs: &Self) -> Result<Self, NumericError> {
        self.checked_mul(rhs).ok_or(NumericError::Overflow)
    }
    fn div(&self, rhs: &Self) -> Result<Self, NumericError> {
        self.checked_div(rhs).ok_or(NumericError::Overflow)
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_f64(&self) -> f64 {
        // Dividing the two halves separately keeps large-but-valid ratios finite.
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) => n / d,
            _ => f64::NAN,
        }
    }
    fn tolerance() -> Self {
        <Ratio<i128> as Zero>::zero()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

/// A stored graph quantity: its binary float value and, when one exists, the
/// exact rational it was written as.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Number {
    value: f64,
    exact: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a decimal number: {0:?}")]
pub struct ParseNumberError(pub String);

impl Number {
    pub fn from_rational(r: Rational) -> Self {
        Number {
            value: r.to_f64(),
            exact: Some(r),
        }
    }

    pub fn from_ratio(numer: i128, denom: i128) -> Self {
        Self::from_rational(Ratio::new(numer, denom))
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(Ratio::from_integer(v as i128))
    }

    /// The exact part is the rational spelled by the shortest decimal that
    /// round-trips `v`, so writing and re-reading a value is stable.
    pub fn from_f64(v: f64) -> Self {
        let exact = if v.is_finite() {
            parse_decimal_exact(&format!("{v}"))
        } else {
            None
        };
        Number { value: v, exact }
    }

    /// Parse decimal text such as `0.125`, `-3`, or `1e-2`. The float value
    /// is correctly rounded; the exact part is kept when it fits in `i128`.
    pub fn parse_decimal(text: &str) -> Result<Self, ParseNumberError> {
        let t = text.trim();
        if !is_decimal_syntax(t) {
            return Err(ParseNumberError(text.to_string()));
        }
        let value: f64 = t.parse().map_err(|_| ParseNumberError(text.to_string()))?;
        Ok(Number {
            value,
            exact: parse_decimal_exact(t),
        })
    }

    /// Parse `p/q`, `p`, or decimal text as an exact value.
    pub fn parse_exact(text: &str) -> Result<Self, ParseNumberError> {
        let t = text.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: i128 = p.trim().parse().map_err(|_| ParseNumberError(text.to_string()))?;
            let q: i128 = q.trim().parse().map_err(|_| ParseNumberError(text.to_string()))?;
            if q == 0 {
                return Err(ParseNumberError(text.to_string()));
            }
            return Ok(Self::from_ratio(p, q));
        }
        let n = Self::parse_decimal(t)?;
        match n.exact {
            Some(r) => Ok(Self::from_rational(r)),
            None => Err(ParseNumberError(text.to_string())),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Option<Rational> {
        self.exact
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0.0 && self.exact.is_none_or(|r| r.is_zero())
    }

    pub fn mul(&self, rhs: &Number) -> Number {
        Number {
            value: self.value * rhs.value,
            exact: match (self.exact, rhs.exact) {
                (Some(a), Some(b)) => a.checked_mul(&b),
                _ => None,
            },
        }
    }

    pub fn div(&self, rhs: &Number) -> Number {
        Number {
            value: self.value / rhs.value,
            exact: match (self.exact, rhs.exact) {
                (Some(a), Some(b)) if !b.is_zero() => a.checked_div(&b),
                _ => None,
            },
        }
    }

    pub fn add(&self, rhs: &Number) -> Number {
        Number {
            value: self.value + rhs.value,
            exact: match (self.exact, rhs.exact) {
                (Some(a), Some(b)) => a.checked_add(&b),
                _ => None,
            },
        }
    }

    /// True when the exact part differs from what the float's decimal text
    /// would parse back to.
    pub fn needs_exact_annotation(&self) -> bool {
        match self.exact {
            Some(r) => parse_decimal_exact(&format!("{}", self.value)) != Some(r),
            None => false,
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{}", self.value),
        }
    }
}

fn is_decimal_syntax(t: &str) -> bool {
    let b = t.as_bytes();
    let mut i = 0;
    if i < b.len() && b[i] == b'-' {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    if i == int_start {
        return false;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == frac_start {
            return false;
        }
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == b.len()
}

fn parse_decimal_exact(t: &str) -> Option<Rational> {
    let (negative, rest) = match t.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, t),
    };
    let (mantissa, exponent) = match rest.find(['e', 'E']) {
        Some(pos) => (&rest[..pos], rest[pos + 1..].parse::<i32>().ok()?),
        None => (rest, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mut numer: i128 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        let digit = c.to_digit(10)? as i128;
        numer = numer.checked_mul(10)?.checked_add(digit)?;
    }
    let scale = exponent.checked_sub(frac_part.len() as i32)?;
    let pow = 10i128.checked_pow(scale.unsigned_abs())?;
    let r = if scale >= 0 {
        Ratio::from_integer(numer.checked_mul(pow)?)
    } else {
        Ratio::new(numer, pow)
    };
    Some(if negative { -r } else { r })
}

/// Format with `digits` significant digits, switching to scientific notation
/// for very large or very small magnitudes. Used for CSV output.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let exp = x.abs().log10().floor() as i32;
    if !(-5..(digits as i32)).contains(&exp) {
        let s = format!("{:.*e}", digits - 1, x);
        return trim_scientific(&s);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    // Rounding can carry into a new leading digit; that only adds a digit of
    // precision so it is left as is.
    trim_fraction(&s)
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".to_string()
        } else {
            t.to_string()
        }
    } else {
        s.to_string()
    }
}

fn trim_scientific(s: &str) -> String {
    match s.split_once('e') {
        Some((m, e)) => format!("{}e{}", trim_fraction(m), e),
        None => s.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        let n = Number::parse_decimal("0.125").unwrap();
        assert_eq!(n.exact(), Some(Ratio::new(1, 8)));
        assert_eq!(n.value(), 0.125);
        let n = Number::parse_decimal("-2.5e-1").unwrap();
        assert_eq!(n.exact(), Some(Ratio::new(-1, 4)));
        let n = Number::parse_decimal("3E2").unwrap();
        assert_eq!(n.exact(), Some(Ratio::from_integer(300)));
    }

    #[test]
    fn decimal_parsing_rejects_garbage() {
        for bad in ["", "abc", "1.", ".5", "1e", "--1", "1.2.3", "0x10"] {
            assert!(Number::parse_decimal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn tiny_exponents_keep_float_but_drop_exact() {
        let n = Number::parse_decimal("1e-300").unwrap();
        assert_eq!(n.value(), 1e-300);
        assert!(n.exact().is_none());
    }

    #[test]
    fn float_round_trip_annotation() {
        let third = Number::from_ratio(1, 3);
        assert!(third.needs_exact_annotation());
        let eighth = Number::from_ratio(1, 8);
        assert!(!eighth.needs_exact_annotation());
        let f = Number::from_f64(0.1);
        assert_eq!(f.exact(), Some(Ratio::new(1, 10)));
    }

    #[test]
    fn exact_parse_accepts_fractions() {
        assert_eq!(
            Number::parse_exact("1/24").unwrap().exact(),
            Some(Ratio::new(1, 24))
        );
        assert!(Number::parse_exact("1/0").is_err());
    }

    #[test]
    fn rational_overflow_is_reported() {
        let big = Rational::from_integer(i128::MAX / 2);
        assert_eq!(big.mul(&big), Err(NumericError::Overflow));
        assert!(<Rational as Scalar>::one().div(&<Rational as Scalar>::zero()).is_err());
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(2.0, 12), "2");
        assert_eq!(format_significant(0.1 + 0.2, 12), "0.3");
        assert_eq!(format_significant(-1.0 / 3.0, 12), "-0.333333333333");
        assert_eq!(format_significant(1.5e-9, 12), "1.5e-9");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(123456.0, 12), "123456");
    }
}
