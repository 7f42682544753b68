//! Exact rational scalars: parsing, formatting, and the extension of the
//! rationals by a single point at positive infinity.
//!
//! All quantities in this crate are exact. Decimal literals are converted to
//! rationals without rounding ("1.25" becomes 5/4) and nothing is ever turned
//! into a float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Errors produced when reading a rational literal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("invalid number `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `p/q`, integer, or decimal literals into an exact rational.
///
/// Decimals are expanded over a power of ten, so the result is exact.
/// A single leading `-` is accepted.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseRationalError> {
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    if body.is_empty() {
        return Err(ParseRationalError::Invalid(text.to_string()));
    }
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_digits(num).ok_or_else(|| ParseRationalError::Invalid(text.to_string()))?;
        let den = parse_digits(den).ok_or_else(|| ParseRationalError::Invalid(text.to_string()))?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(text.to_string()));
        }
        BigRational::new(num, den)
    } else if let Some((int_part, frac_part)) = body.split_once('.') {
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ParseRationalError::Invalid(text.to_string()));
        }
        let int = if int_part.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(int_part).ok_or_else(|| ParseRationalError::Invalid(text.to_string()))?
        };
        let (frac, scale) = if frac_part.is_empty() {
            (BigInt::zero(), BigInt::one())
        } else {
            let digits = parse_digits(frac_part)
                .ok_or_else(|| ParseRationalError::Invalid(text.to_string()))?;
            (digits, BigInt::from(10u32).pow(frac_part.len() as u32))
        };
        BigRational::new(int * &scale + frac, scale)
    } else {
        let int = parse_digits(body).ok_or_else(|| ParseRationalError::Invalid(text.to_string()))?;
        BigRational::from_integer(int)
    };
    Ok(if negative { -value } else { value })
}

fn parse_digits(text: &str) -> Option<BigInt> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Formats a rational as `p` or `p/q`, always in lowest terms.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// A rational number extended with a single point at `+inf`.
///
/// This is the value space of valuations (`val(0) = +inf`) and of min-plus
/// coordinates. Infinity compares greater than every finite value and
/// absorbs addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtRational {
    Finite(BigRational),
    Infinity,
}

impl ExtRational {
    pub fn from_int(value: i64) -> Self {
        ExtRational::Finite(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(q) => Some(q),
            ExtRational::Infinity => None,
        }
    }

    /// Multiplies by a nonnegative integer; `inf * k = inf` for `k > 0` and
    /// `inf * 0 = 0` (the empty sum).
    pub fn scale(&self, k: u32) -> ExtRational {
        if k == 0 {
            return ExtRational::from_int(0);
        }
        match self {
            ExtRational::Finite(q) => ExtRational::Finite(q * BigRational::from_integer(k.into())),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }
}

impl From<BigRational> for ExtRational {
    fn from(value: BigRational) -> Self {
        ExtRational::Finite(value)
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
            (ExtRational::Infinity, ExtRational::Finite(_)) => Ordering::Greater,
            (ExtRational::Finite(_), ExtRational::Infinity) => Ordering::Less,
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add<&ExtRational> for &ExtRational {
    type Output = ExtRational;

    fn add(self, rhs: &ExtRational) -> ExtRational {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinity,
        }
    }
}

impl Sub<&BigRational> for &ExtRational {
    type Output = ExtRational;

    fn sub(self, rhs: &BigRational) -> ExtRational {
        match self {
            ExtRational::Finite(a) => ExtRational::Finite(a - rhs),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }
}

impl Neg for &ExtRational {
    type Output = ExtRational;

    /// Negates a finite value; infinity is a fixed point (there is no `-inf`
    /// in this one-sided extension, and nothing in the crate negates it).
    fn neg(self) -> ExtRational {
        match self {
            ExtRational::Finite(q) => ExtRational::Finite(-q),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(q) => write!(f, "{}", format_rational(q)),
            ExtRational::Infinity => write!(f, "inf"),
        }
    }
}
