//! Minimal ring abstraction shared by the matrix kernel.
//!
//! The Newton-transform recursion only needs ring operations plus exact
//! division by small positive integers, so the same code runs on `f64`,
//! on integers (where every division it performs is exact), on rationals,
//! and on first-order dual numbers when derivatives are wanted.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    /// Division by a positive integer. Integer implementations assume the
    /// quotient is exact.
    fn div_int(self, d: i64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn div_int(self, d: i64) -> Self {
        self / d as f64
    }
}

macro_rules! int_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn zero() -> Self {
                0
            }
            fn one() -> Self {
                1
            }
            fn from_int(v: i64) -> Self {
                v as $t
            }
            fn div_int(self, d: i64) -> Self {
                debug_assert_eq!(self % (d as $t), 0, "inexact integer division");
                self / d as $t
            }
        }
    };
}

int_scalar!(i64);
int_scalar!(i128);

/// A [`Scalar`] with general division.
pub trait Field: Scalar {
    fn quot(self, rhs: Self) -> Self;
}

impl Field for f64 {
    fn quot(self, rhs: Self) -> Self {
        self / rhs
    }
}

#[cfg(test)]
mod rational {
    use super::{Field, Scalar};
    use num_rational::Ratio;

    impl Scalar for Ratio<i128> {
        fn zero() -> Self {
            Ratio::from_integer(0)
        }
        fn one() -> Self {
            Ratio::from_integer(1)
        }
        fn from_int(v: i64) -> Self {
            Ratio::from_integer(v as i128)
        }
        fn div_int(self, d: i64) -> Self {
            self / Ratio::from_integer(d as i128)
        }
    }

    impl Field for Ratio<i128> {
        fn quot(self, rhs: Self) -> Self {
            self / rhs
        }
    }
}
