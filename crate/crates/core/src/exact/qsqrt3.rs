use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::rational::{self, int, Rational};
use crate::error::{Error, Result};

/// An element `a + b·√3` of the quadratic field ℚ(√3).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct QSqrt3 {
    pub a: Rational,
    pub b: Rational,
}

impl QSqrt3 {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn rational(a: Rational) -> Self {
        Self { a, b: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(int(1))
    }

    /// `0 + 1·√3`.
    pub fn sqrt3() -> Self {
        Self::new(Rational::zero(), int(1))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a.clone(), -&self.b)
    }

    /// Field norm `a² − 3b²`; zero only for the zero element since √3 ∉ ℚ.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - int(3) * &self.b * &self.b
    }

    /// `(a − b√3)/(a² − 3b²)`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero in Q(sqrt 3)".into()));
        }
        let n = self.norm();
        Ok(Self::new(&self.a / &n, -&self.b / &n))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.a * r, &self.b * r)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.a) + rational::to_f64(&self.b) * 3f64.sqrt()
    }

    /// Sign of the real number `a + b√3`, decided exactly.
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        // Opposite signs: compare a² with 3b².
        let lhs = &self.a * &self.a;
        let rhs = int(3) * &self.b * &self.b;
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }
}

fn sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Display for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·√3", self.a, self.b)
    }
}

impl Serialize for QSqrt3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("a", &rational::to_string(&self.a))?;
        m.serialize_entry("b", &rational::to_string(&self.b))?;
        m.end()
    }
}

impl From<Rational> for QSqrt3 {
    fn from(r: Rational) -> Self {
        Self::rational(r)
    }
}

impl From<i64> for QSqrt3 {
    fn from(n: i64) -> Self {
        Self::rational(int(n))
    }
}

impl<'a> Add<&'a QSqrt3> for &'a QSqrt3 {
    type Output = QSqrt3;
    fn add(self, rhs: &QSqrt3) -> QSqrt3 {
        QSqrt3::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl<'a> Sub<&'a QSqrt3> for &'a QSqrt3 {
    type Output = QSqrt3;
    fn sub(self, rhs: &QSqrt3) -> QSqrt3 {
        QSqrt3::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl<'a> Mul<&'a QSqrt3> for &'a QSqrt3 {
    type Output = QSqrt3;
    fn mul(self, rhs: &QSqrt3) -> QSqrt3 {
        let a = &self.a * &rhs.a + int(3) * &self.b * &rhs.b;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QSqrt3::new(a, b)
    }
}

impl Neg for &QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        QSqrt3::new(-&self.a, -&self.b)
    }
}

impl Neg for QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        QSqrt3::new(-self.a, -self.b)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QSqrt3> for QSqrt3 {
            type Output = QSqrt3;
            fn $m(self, rhs: QSqrt3) -> QSqrt3 {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a QSqrt3> for QSqrt3 {
            type Output = QSqrt3;
            fn $m(self, rhs: &QSqrt3) -> QSqrt3 {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<QSqrt3> for &'a QSqrt3 {
            type Output = QSqrt3;
            fn $m(self, rhs: QSqrt3) -> QSqrt3 {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&QSqrt3> for QSqrt3 {
    fn add_assign(&mut self, rhs: &QSqrt3) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl SubAssign<&QSqrt3> for QSqrt3 {
    fn sub_assign(&mut self, rhs: &QSqrt3) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}
