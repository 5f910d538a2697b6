//! Numeric abstraction for selectivities and error metrics.
//!
//! Everything that turns row counts into fractions is generic over
//! [`Scalar`], so the same estimator runs on `f32`/`f64` for speed and on
//! [`num_rational::Rational64`] when a worked example has to be reproduced
//! without rounding.

use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Scalar: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display {
    /// Lossless for counts up to 2^53 on `f64`; exact for rationals.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("row count representable in scalar type")
    }

    fn ratio(numerator: u64, denominator: u64) -> Self {
        Self::from_count(numerator) / Self::from_count(denominator)
    }

    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where T: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn rational_ratio_is_exact() {
        assert_eq!(Rational64::ratio(3, 8), Rational64::new(3, 8));
        assert_eq!(Rational64::from_count(5), Rational64::from_integer(5));
    }

    #[test]
    fn abs_diff_is_symmetric() {
        assert_eq!(0.5f64.abs_diff(&0.375), 0.125);
        assert_eq!(0.375f64.abs_diff(&0.5), 0.125);
        let a = Rational64::new(1, 40);
        assert_eq!(Rational64::from_integer(0).abs_diff(&a), a);
    }
}
