//! Scalar types a density can be measured in.
//!
//! Every checker in this crate compares against exact thresholds (`1/3`,
//! `1/n`, `1/(s+2)`), so the exact [`Rational`](crate::Rational) instance is
//! the one the constructions use. Float instances exist for empirical runs
//! where only an approximate value is reported.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// A value type able to hold `count / n` densities.
pub trait DensityScalar:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// `count / n`; `n` must be positive.
    fn from_counts(count: u64, n: u64) -> Self;

    fn to_f64(&self) -> f64;
}

macro_rules! ratio_scalar {
    ($($int:ty),*) => {$(
        impl DensityScalar for Ratio<$int> {
            fn from_counts(count: u64, n: u64) -> Self {
                Ratio::new(count as $int, n as $int)
            }

            fn to_f64(&self) -> f64 {
                *self.numer() as f64 / *self.denom() as f64
            }
        }
    )*};
}

ratio_scalar!(i64, i128);

impl DensityScalar for Ratio<BigInt> {
    fn from_counts(count: u64, n: u64) -> Self {
        Ratio::new(BigInt::from(count), BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

macro_rules! float_scalar {
    ($($float:ty),*) => {$(
        impl DensityScalar for $float {
            fn from_counts(count: u64, n: u64) -> Self {
                count as $float / n as $float
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    )*};
}

float_scalar!(f32, f64);

/// Decimal rendering of an exact ratio with round-half-even at `places` digits.
pub fn format_decimal<T>(value: &Ratio<T>, places: u32) -> String
where
    T: Clone + Integer + Signed + From<u8> + std::fmt::Display,
{
    let negative = value.is_negative();
    let abs = value.abs();
    let ten = T::from(10u8);
    let mut scale = T::one();
    for _ in 0..places {
        scale = scale * ten.clone();
    }
    let scaled = abs.numer().clone() * scale.clone();
    let (mut quotient, remainder) = scaled.div_rem(abs.denom());
    let twice = remainder * T::from(2u8);
    match twice.cmp(abs.denom()) {
        std::cmp::Ordering::Greater => quotient = quotient + T::one(),
        std::cmp::Ordering::Equal if quotient.is_odd() => quotient = quotient + T::one(),
        _ => {}
    }
    let (int_part, frac_part) = quotient.div_rem(&scale);
    let sign = if negative && !(int_part.is_zero() && frac_part.is_zero()) { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{int_part}");
    }
    let frac = frac_part.to_string();
    let padding = "0".repeat(places as usize - frac.len());
    format!("{sign}{int_part}.{padding}{frac}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn counts_reduce_to_lowest_terms() {
        let r = Rational::from_counts(2, 4);
        assert_eq!((*r.numer(), *r.denom()), (1, 2));
        assert_eq!(f64::from_counts(1, 4), 0.25);
    }

    #[test]
    fn decimal_rounds_half_to_even() {
        assert_eq!(format_decimal(&Rational::new(1, 3), 6), "0.333333");
        assert_eq!(format_decimal(&Rational::new(2, 3), 6), "0.666667");
        assert_eq!(format_decimal(&Rational::new(1, 1), 6), "1.000000");
        // 1/16 = 0.0625 -> ties at 3 places go to even
        assert_eq!(format_decimal(&Rational::new(1, 16), 3), "0.062");
        assert_eq!(format_decimal(&Rational::new(3, 16), 3), "0.188");
        assert_eq!(format_decimal(&Rational::new(1, 8), 2), "0.12");
        assert_eq!(format_decimal(&Rational::new(-1, 4), 1), "-0.2");
    }
}
