use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{angle_add, rational, CirclePoint, Field, QSqrt3, Rational};

/// Number of derivative indeterminates `D_im = Eᵢ(v_m)`.
pub const N_D: usize = 9;

/// Flat index of `D_im` (zero-based `i`, `m`).
pub const fn d_index(i: usize, m: usize) -> usize {
    3 * i + m
}

/// Frame-level data: `V = (v₁, v₂, v₃)` and the angle functions with `θ₁+θ₂+θ₃ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameState<F> {
    pub v: [F; 3],
    cos: [F; 3],
    sin: [F; 3],
}

fn inv<F: Field>(x: &F) -> F {
    x.inv().expect("state invariants exclude vanishing denominators")
}

impl<F: Field> FrameState<F> {
    /// Builds the state from `(cos θ, sin θ)` of θ₁ and θ₂; rejects states with
    /// `sin(θ_a − θ_b) = 0` for some `a ≠ b`.
    pub fn new(v: [F; 3], theta1: (F, F), theta2: (F, F)) -> Result<Self> {
        let (c1, s1) = theta1;
        let (c2, s2) = theta2;
        let unit = |c: &F, s: &F| {
            let r = c.clone() * c.clone() + s.clone() * s.clone() - F::one();
            r.is_negligible() || (!F::EXACT && r.magnitude() < 1e-9)
        };
        if !unit(&c1, &s1) || !unit(&c2, &s2) {
            return Err(Error::InvalidState("angle data must lie on the unit circle".into()));
        }
        // θ₃ = −(θ₁+θ₂)
        let c3 = c1.clone() * c2.clone() - s1.clone() * s2.clone();
        let s3 = -(s1.clone() * c2.clone() + c1.clone() * s2.clone());
        let st = Self { v, cos: [c1, c2, c3], sin: [s1, s2, s3] };
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            if st.sin_diff(a, b).is_negligible() {
                return Err(Error::InvalidState(format!("sin(θ{} − θ{}) vanishes", a + 1, b + 1)));
            }
        }
        Ok(st)
    }

    pub fn cos(&self, a: usize) -> &F {
        &self.cos[a]
    }

    pub fn sin(&self, a: usize) -> &F {
        &self.sin[a]
    }

    pub fn cos_diff(&self, a: usize, b: usize) -> F {
        self.cos[a].clone() * self.cos[b].clone() + self.sin[a].clone() * self.sin[b].clone()
    }

    pub fn sin_diff(&self, a: usize, b: usize) -> F {
        self.sin[a].clone() * self.cos[b].clone() - self.cos[a].clone() * self.sin[b].clone()
    }

    pub fn cot_diff(&self, a: usize, b: usize) -> F {
        self.cos_diff(a, b) * inv(&self.sin_diff(a, b))
    }

    pub fn cos2(&self, a: usize) -> F {
        self.cos[a].clone() * self.cos[a].clone() - self.sin[a].clone() * self.sin[a].clone()
    }

    pub fn sin2(&self, a: usize) -> F {
        F::from_i64(2) * self.sin[a].clone() * self.cos[a].clone()
    }

    /// `sin(2θ_a − 2θ_b)`.
    pub fn sin2_diff(&self, a: usize, b: usize) -> F {
        self.sin2(a) * self.cos2(b) - self.cos2(a) * self.sin2(b)
    }

    /// `|V|²`.
    pub fn norm2(&self) -> F {
        self.v.iter().fold(F::zero(), |acc, x| acc + x.clone() * x.clone())
    }

    /// `4v₁² − 3(v₂² + v₃²)`.
    pub fn ec(&self) -> F {
        let [v1, v2, v3] = self.v.clone();
        F::from_i64(4) * v1.clone() * v1 - F::from_i64(3) * (v2.clone() * v2 + v3.clone() * v3)
    }

    pub fn ec_nonzero(&self) -> bool {
        !self.ec().is_negligible()
    }
}

/// Exact state together with the rational data it was built from.
#[derive(Clone, Debug, Serialize)]
pub struct ExactState {
    #[serde(serialize_with = "ser_rationals")]
    pub v: [Rational; 3],
    pub theta1: CirclePoint,
    pub theta2: CirclePoint,
    pub theta3: CirclePoint,
    #[serde(skip)]
    pub state: FrameState<QSqrt3>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for r in v {
        seq.serialize_element(&rational::to_string(r))?;
    }
    seq.end()
}

impl ExactState {
    pub fn new(v: [Rational; 3], theta1: CirclePoint, theta2: CirclePoint) -> Result<Self> {
        let q = |r: &Rational| QSqrt3::rational(r.clone());
        let state = FrameState::new(
            [q(&v[0]), q(&v[1]), q(&v[2])],
            (q(theta1.cos()), q(theta1.sin())),
            (q(theta2.cos()), q(theta2.sin())),
        )?;
        let theta3 = angle_add(&theta1, &theta2).negate();
        Ok(Self { v, theta1, theta2, theta3, state })
    }

    pub fn with_v(&self, v: [Rational; 3]) -> Result<Self> {
        Self::new(v, self.theta1.clone(), self.theta2.clone())
    }
}

/// Numeric state built from angles in radians.
pub fn numeric_state(v: [f64; 3], theta1: f64, theta2: f64) -> Result<FrameState<f64>> {
    FrameState::new(v, (theta1.cos(), theta1.sin()), (theta2.cos(), theta2.sin()))
}

/// Affine expression `constant + Σ grad[n]·D_n` in the derivative indeterminates.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine<F> {
    pub constant: F,
    pub grad: [F; N_D],
}

impl<F: Field> Affine<F> {
    pub fn zero() -> Self {
        Self::constant(F::zero())
    }

    pub fn constant(c: F) -> Self {
        Self { constant: c, grad: std::array::from_fn(|_| F::zero()) }
    }

    pub fn var(n: usize) -> Self {
        let mut a = Self::zero();
        a.grad[n] = F::one();
        a
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            constant: self.constant.clone() + o.constant.clone(),
            grad: std::array::from_fn(|n| self.grad[n].clone() + o.grad[n].clone()),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-F::one()))
    }

    pub fn scale(&self, s: &F) -> Self {
        Self {
            constant: self.constant.clone() * s.clone(),
            grad: std::array::from_fn(|n| self.grad[n].clone() * s.clone()),
        }
    }

    pub fn eval(&self, d: &[F; N_D]) -> F {
        (0..N_D).fold(self.constant.clone(), |acc, n| acc + self.grad[n].clone() * d[n].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_negligible() && self.grad.iter().all(Field::is_negligible)
    }

    pub fn is_constant(&self) -> bool {
        self.grad.iter().all(Field::is_negligible)
    }

    /// Replaces `D_n` by `value`.
    pub fn substitute(&self, n: usize, value: &Self) -> Self {
        let mut out = self.clone();
        let c = std::mem::replace(&mut out.grad[n], F::zero());
        out.add(&value.scale(&c))
    }

    /// Sets the listed indeterminates to zero.
    pub fn restrict(&self, vanishing: &[usize]) -> Self {
        let mut out = self.clone();
        for &n in vanishing {
            out.grad[n] = F::zero();
        }
        out
    }

    pub fn max_magnitude(&self) -> f64 {
        self.grad.iter().fold(self.constant.magnitude(), |m, x| m.max(x.magnitude()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, rat_circle_point};

    #[test]
    fn degenerate_angles_rejected() {
        let p = rat_circle_point(&rat(1, 3));
        let r = ExactState::new([int(1), int(0), int(0)], p.clone(), p);
        assert!(matches!(r, Err(Error::InvalidState(_))));
    }

    #[test]
    fn angle_sum_is_zero() {
        let st = ExactState::new([int(1), int(2), int(3)], rat_circle_point(&rat(1, 3)), rat_circle_point(&rat(-2, 5)))
            .unwrap();
        let s = angle_add(&angle_add(&st.theta1, &st.theta2), &st.theta3);
        assert_eq!(s, CirclePoint::identity());
        let json = serde_json::to_value(&st).unwrap();
        assert_eq!(json["v"][2], "3/1");
    }

    #[test]
    fn affine_substitution() {
        let e: Affine<QSqrt3> = Affine::var(0).add(&Affine::var(1).scale(&QSqrt3::from(2)));
        let s = e.substitute(1, &Affine::constant(QSqrt3::from(5)));
        assert_eq!(s.constant, QSqrt3::from(10));
        assert!(s.grad[1].is_zero());
        assert!(!s.grad[0].is_zero());
        assert!(e.restrict(&[0, 1]).is_zero());
    }
}
