//! Scalar abstraction for signal strengths, thresholds and reinforced weights.
//!
//! The simulator only needs addition, subtraction and ordering of input
//! values, so every numeric type that satisfies [`Scalar`] can drive it:
//! `f32`, `f64` and the exact [`Rational`](crate::Rational).

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::Num;
use serde::Serialize;

/// Numeric type usable as a signal strength / weight.
pub trait Scalar:
    Num + Copy + PartialOrd + Debug + Display + Serialize + Send + Sync + 'static
{
    /// Parses an unsigned decimal literal such as `1`, `0.25` or `.5`.
    ///
    /// The caller has already checked the grammar; `None` means the value
    /// is not representable (overflow or a non-finite float).
    fn parse_decimal(literal: &str) -> Option<Self>;

    /// Decimal text that [`Scalar::parse_decimal`] reads back to `self`.
    fn render_decimal(&self) -> String;

    /// True for values that are exactly zero or exactly one.
    fn is_binary(&self) -> bool {
        self.is_zero() || self.is_one()
    }
}

impl Scalar for f64 {
    fn parse_decimal(literal: &str) -> Option<Self> {
        literal.parse::<f64>().ok().filter(|v| v.is_finite())
    }

    fn render_decimal(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f32 {
    fn parse_decimal(literal: &str) -> Option<Self> {
        literal.parse::<f32>().ok().filter(|v| v.is_finite())
    }

    fn render_decimal(&self) -> String {
        self.to_string()
    }
}

impl Scalar for Ratio<i64> {
    fn parse_decimal(literal: &str) -> Option<Self> {
        let (whole, frac) = match literal.split_once('.') {
            Some((w, f)) => (w, f),
            None => (literal, ""),
        };
        let mut numer: i64 = 0;
        for d in whole.chars().chain(frac.chars()) {
            let digit = d.to_digit(10)? as i64;
            numer = numer.checked_mul(10)?.checked_add(digit)?;
        }
        let denom = 10_i64.checked_pow(u32::try_from(frac.len()).ok()?)?;
        Some(Ratio::new(numer, denom))
    }

    /// Exact when the reduced denominator divides a power of ten; other
    /// values fall back to the nearest `f64`.
    fn render_decimal(&self) -> String {
        let (numer, denom) = (*self.numer(), *self.denom());
        let (mut rest, mut twos, mut fives) = (denom, 0_u32, 0_u32);
        while rest % 2 == 0 {
            rest /= 2;
            twos += 1;
        }
        while rest % 5 == 0 {
            rest /= 5;
            fives += 1;
        }
        if rest != 1 {
            return (numer as f64 / denom as f64).to_string();
        }
        let digits = twos.max(fives);
        let unit = 10_i128.pow(digits);
        let scaled = numer as i128 * unit / denom as i128;
        let sign = if scaled < 0 { "-" } else { "" };
        let (whole, frac) = (scaled.abs() / unit, scaled.abs() % unit);
        if frac == 0 {
            format!("{sign}{whole}")
        } else {
            let frac = format!("{frac:0width$}", width = digits as usize);
            format!("{sign}{whole}.{}", frac.trim_end_matches('0'))
        }
    }
}
