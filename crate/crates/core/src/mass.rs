//! Numeric types usable as belief masses.
//!
//! Every algorithm in this crate is generic over [`Mass`] so the same code
//! path runs on exact rationals (tests, oracles) and on `f64` (the CLI).

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational mass.
pub type Rational = BigRational;

/// Tolerance used when checking that `f64` masses sum to one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// `f64` focal elements lighter than this are dropped after combination and
/// their mass is moved to the whole frame.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// `f64` conflicts within this distance of one count as total conflict.
pub const TOTAL_CONFLICT_TOLERANCE: f64 = 1e-12;

pub trait Mass:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// `num / den`. Panics when `den` is zero.
    fn from_ratio(num: u64, den: u64) -> Self;

    /// Converts a float. Rationals take the exact binary value of `x`.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Parses a decimal literal (`"0.8"`, `"1"`, `"1e-3"`) or a fraction (`"2/3"`).
    fn parse(text: &str) -> Option<Self>;

    /// Lossless text form: a decimal when one exists, otherwise `p/q`.
    fn to_text(&self) -> String;

    /// Small enough to be pruned from a focal set.
    fn is_negligible(&self) -> bool;

    /// Equal up to the normalization tolerance (exact for rationals).
    fn approx_eq(&self, other: &Self) -> bool;

    /// Whether this conflict value should be treated as total conflict.
    fn is_total(&self) -> bool;

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn clamp_unit(self) -> Self {
        if self < Self::zero() {
            Self::zero()
        } else if self > Self::one() {
            Self::one()
        } else {
            self
        }
    }
}

impl Mass for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            if den == 0.0 {
                return None;
            }
            return Some(num / den).filter(|v| v.is_finite());
        }
        text.parse::<f64>().ok().filter(|v| v.is_finite())
    }

    fn to_text(&self) -> String {
        format!("{}", self)
    }

    fn is_negligible(&self) -> bool {
        self.abs() < PRUNE_THRESHOLD
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= NORMALIZATION_TOLERANCE
    }

    fn is_total(&self) -> bool {
        (1.0 - self).abs() < TOTAL_CONFLICT_TOLERANCE
    }
}

impl Mass for BigRational {
    fn from_ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num: BigInt = num.trim().parse().ok()?;
            let den: BigInt = den.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            return Some(BigRational::new(num, den));
        }
        parse_decimal(text)
    }

    fn to_text(&self) -> String {
        rational_to_text(self)
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn is_total(&self) -> bool {
        self.is_one()
    }
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{}{}", int_part, frac_part);
    let mut num: BigInt = digits.parse().ok()?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

fn rational_to_text(value: &BigRational) -> String {
    let den = value.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut rest = den.clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&rest % &two).is_zero() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", value.numer(), den);
    }
    let places = twos.max(fives);
    if places == 0 {
        return value.numer().to_string();
    }
    let scaled = value.numer() * num_traits::pow(BigInt::from(10u32), places) / &den;
    let negative = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let padded = format!("{:0>width$}", digits, width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    let frac_part = frac_part.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if frac_part.is_empty() {
        format!("{}{}", sign, int_part)
    } else {
        format!("{}{}.{}", sign, int_part, frac_part)
    }
}
