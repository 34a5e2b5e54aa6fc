use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::rational::{self, int, Rational};

/// Exact cosine/sine pair of an implicit angle; `c² + s² = 1` always holds.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CirclePoint {
    c: Rational,
    s: Rational,
}

impl CirclePoint {
    /// Returns `None` unless `c² + s² = 1` exactly.
    pub fn new(c: Rational, s: Rational) -> Option<Self> {
        if (&c * &c + &s * &s).is_one() {
            Some(Self { c, s })
        } else {
            None
        }
    }

    fn from_parts(c: Rational, s: Rational) -> Self {
        let p = Self { c, s };
        debug_assert!(p.on_circle());
        p
    }

    pub fn identity() -> Self {
        Self::from_parts(int(1), Rational::zero())
    }

    pub fn cos(&self) -> &Rational {
        &self.c
    }

    pub fn sin(&self) -> &Rational {
        &self.s
    }

    pub fn on_circle(&self) -> bool {
        (&self.c * &self.c + &self.s * &self.s).is_one()
    }

    /// The point of angle `−φ`.
    pub fn negate(&self) -> Self {
        Self::from_parts(self.c.clone(), -&self.s)
    }

    /// Angle `φ − ψ`.
    pub fn sub(&self, other: &Self) -> Self {
        angle_add(self, &other.negate())
    }

    /// Angle `2φ`.
    pub fn double(&self) -> Self {
        angle_add(self, self)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational::to_f64(&self.c), rational::to_f64(&self.s))
    }
}

impl Serialize for CirclePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("cos", &rational::to_string(&self.c))?;
        m.serialize_entry("sin", &rational::to_string(&self.s))?;
        m.end()
    }
}

/// Tangent half-angle parametrization `t ↦ ((1−t²)/(1+t²), 2t/(1+t²))`.
pub fn rat_circle_point(t: &Rational) -> CirclePoint {
    let t2 = t * t;
    let den = int(1) + &t2;
    CirclePoint::from_parts((int(1) - &t2) / &den, (int(2) * t) / &den)
}

/// Angle addition `(c₁c₂ − s₁s₂, s₁c₂ + c₁s₂)`.
pub fn angle_add(p: &CirclePoint, q: &CirclePoint) -> CirclePoint {
    CirclePoint::from_parts(&p.c * &q.c - &p.s * &q.s, &p.s * &q.c + &p.c * &q.s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;
    use proptest::prelude::*;

    fn cp(c: Rational, s: Rational) -> CirclePoint {
        CirclePoint::new(c, s).unwrap()
    }

    #[test]
    fn tan_half_angle_examples() {
        assert_eq!(rat_circle_point(&int(0)), cp(int(1), int(0)));
        assert_eq!(rat_circle_point(&int(1)), cp(int(0), int(1)));
        assert_eq!(rat_circle_point(&rat(1, 2)), cp(rat(3, 5), rat(4, 5)));
    }

    #[test]
    fn addition_examples() {
        let q = rat_circle_point(&rat(-7, 11));
        assert_eq!(angle_add(&CirclePoint::identity(), &q), q);
        let quarter = cp(int(0), int(1));
        assert_eq!(angle_add(&quarter, &quarter), cp(int(-1), int(0)));
        let p = cp(rat(3, 5), rat(4, 5));
        let m = cp(rat(3, 5), rat(-4, 5));
        assert_eq!(angle_add(&p, &m), CirclePoint::identity());
    }

    #[test]
    fn rejects_off_circle() {
        assert!(CirclePoint::new(rat(1, 2), rat(1, 2)).is_none());
    }

    proptest! {
        #[test]
        fn operations_stay_on_circle(a in -500i64..500, b in 1i64..200, c in -500i64..500, d in 1i64..200) {
            let p = rat_circle_point(&rat(a, b));
            let q = rat_circle_point(&rat(c, d));
            prop_assert!(p.on_circle());
            prop_assert!(angle_add(&p, &q).on_circle());
            prop_assert!(p.sub(&q).on_circle());
            prop_assert!(p.double().on_circle());
            prop_assert_eq!(p.sub(&p), CirclePoint::identity());
        }

        #[test]
        fn parametrization_is_injective(a in -300i64..300, b in 1i64..100, c in -300i64..300, d in 1i64..100) {
            let (s, t) = (rat(a, b), rat(c, d));
            if s != t {
                prop_assert_ne!(rat_circle_point(&s), rat_circle_point(&t));
            }
        }
    }
}
