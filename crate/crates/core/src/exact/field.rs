use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use super::qsqrt3::QSqrt3;
use super::rational::{self, Rational};

/// Scalar field shared by the exact (ℚ(√3)) and floating-point proof routes.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn sqrt3() -> Self;
    fn inv(&self) -> Option<Self>;
    /// Exact zero test for ℚ(√3); for floats, `|x| <= 1e-11`.
    fn is_negligible(&self) -> bool;
    fn magnitude(&self) -> f64;
    fn to_f64(&self) -> f64;
}

impl Field for QSqrt3 {
    const EXACT: bool = true;

    fn zero() -> Self {
        QSqrt3::zero()
    }
    fn one() -> Self {
        QSqrt3::one()
    }
    fn from_i64(n: i64) -> Self {
        QSqrt3::from(n)
    }
    fn from_rational(r: &Rational) -> Self {
        QSqrt3::rational(r.clone())
    }
    fn sqrt3() -> Self {
        QSqrt3::sqrt3()
    }
    fn inv(&self) -> Option<Self> {
        QSqrt3::inv(self).ok()
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        QSqrt3::to_f64(self).abs()
    }
    fn to_f64(&self) -> f64 {
        QSqrt3::to_f64(self)
    }
}

impl Field for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_rational(r: &Rational) -> Self {
        rational::to_f64(r)
    }
    fn sqrt3() -> Self {
        3f64.sqrt()
    }
    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn is_negligible(&self) -> bool {
        self.abs() <= 1e-11
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Ring-operation shorthands that read better than repeated `.clone()`.
pub fn sq<F: Field>(x: &F) -> F {
    x.clone() * x.clone()
}
