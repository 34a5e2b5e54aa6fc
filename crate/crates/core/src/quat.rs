//! Double-precision quaternion algebra for the numeric geometry layer.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A purely imaginary quaternion `xi + yj + zk`, used as a 3-vector.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ImaginaryQuaternion {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const UNIT_TOL: f64 = 1e-9;

impl Quaternion {
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn dot(self, o: Self) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(self) -> Result<Self> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Domain("cannot normalize a zero quaternion".into()));
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn imag(self) -> ImaginaryQuaternion {
        ImaginaryQuaternion::new(self.x, self.y, self.z)
    }

    pub fn is_unit(self) -> bool {
        (self.norm() - 1.0).abs() < UNIT_TOL
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// `q · α` for imaginary `α`.
    pub fn mul_im(self, a: ImaginaryQuaternion) -> Self {
        self * a.to_quaternion()
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.w + b.w, self.x + b.x, self.y + b.y, self.z + b.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.w - b.w, self.x - b.x, self.y - b.y, self.z - b.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl ImaginaryQuaternion {
    pub const I: Self = Self::new(1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 1.0);
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Basis vector `i`, `j` or `k` by index.
    pub fn basis(n: usize) -> Self {
        match n {
            0 => Self::I,
            1 => Self::J,
            2 => Self::K,
            _ => panic!("imaginary basis index {n} out of range"),
        }
    }

    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Add for ImaginaryQuaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for ImaginaryQuaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for ImaginaryQuaternion {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul<f64> for ImaginaryQuaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

pub fn mul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

/// `cos|α| + sin|α|·α/|α|`, with a series for `sin|α|/|α|` near zero.
pub fn exp_im(a: ImaginaryQuaternion) -> Quaternion {
    let t = a.norm();
    let sinc = if t < 1e-6 { 1.0 - t * t / 6.0 } else { t.sin() / t };
    Quaternion::new(t.cos(), a.x * sinc, a.y * sinc, a.z * sinc)
}

/// Principal logarithm of a unit quaternion, inverse of [`exp_im`] on `|α| < π`.
pub fn log_unit(q: Quaternion) -> Result<ImaginaryQuaternion> {
    let n = q.norm();
    if !n.is_finite() || (n - 1.0).abs() >= UNIT_TOL {
        return Err(Error::Domain(format!("log_unit needs a unit quaternion, |q| = {n}")));
    }
    let q = q.scale(1.0 / n);
    let v = q.imag();
    let s = v.norm();
    if q.w < 0.0 && s < 1e-7 {
        return Err(Error::Branch("log_unit at the antipode -1 has no principal value".into()));
    }
    let angle = s.atan2(q.w);
    let f = if s < 1e-12 { 1.0 } else { angle / s };
    Ok(v.scale(f))
}
