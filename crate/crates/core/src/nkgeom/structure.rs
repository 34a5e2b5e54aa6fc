use nalgebra::{SMatrix, SVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quat::{ImaginaryQuaternion, Quaternion};

pub type Vec6 = SVector<f64, 6>;
pub type Mat6 = SMatrix<f64, 6, 6>;

const BASE_TOL: f64 = 1e-12;

/// A point `(p, q)` of S³×S³, both factors unit quaternions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointS3S3 {
    p: Quaternion,
    q: Quaternion,
}

impl PointS3S3 {
    pub fn new(p: Quaternion, q: Quaternion) -> Result<Self> {
        if !p.is_unit() || !q.is_unit() {
            return Err(Error::Domain(format!(
                "point factors must be unit quaternions (|p| = {}, |q| = {})",
                p.norm(),
                q.norm()
            )));
        }
        Ok(Self { p, q })
    }

    pub fn identity() -> Self {
        Self { p: Quaternion::ONE, q: Quaternion::ONE }
    }

    pub fn p(&self) -> Quaternion {
        self.p
    }

    pub fn q(&self) -> Quaternion {
        self.q
    }

    pub fn distance(&self, o: &Self) -> f64 {
        (self.p - o.p).norm().max((self.q - o.q).norm())
    }

    pub fn same_as(&self, o: &Self) -> bool {
        self.distance(o) <= BASE_TOL
    }
}

/// The tangent vector `(pα, qβ)` at `base`, stored as the pair `(α, β)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TangentVector {
    pub base: PointS3S3,
    pub alpha: ImaginaryQuaternion,
    pub beta: ImaginaryQuaternion,
}

impl TangentVector {
    pub fn new(base: PointS3S3, alpha: ImaginaryQuaternion, beta: ImaginaryQuaternion) -> Self {
        Self { base, alpha, beta }
    }

    pub fn zero(base: PointS3S3) -> Self {
        Self::new(base, ImaginaryQuaternion::ZERO, ImaginaryQuaternion::ZERO)
    }

    /// `(α₁, α₂, α₃, β₁, β₂, β₃)`.
    pub fn coords(&self) -> Vec6 {
        Vec6::new(self.alpha.x, self.alpha.y, self.alpha.z, self.beta.x, self.beta.y, self.beta.z)
    }

    pub fn from_coords(base: PointS3S3, c: &Vec6) -> Self {
        Self::new(base, ImaginaryQuaternion::new(c[0], c[1], c[2]), ImaginaryQuaternion::new(c[3], c[4], c[5]))
    }

    /// The vector in ℝ⁸ = ℍ × ℍ.
    pub fn ambient(&self) -> [Quaternion; 2] {
        [self.base.p.mul_im(self.alpha), self.base.q.mul_im(self.beta)]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.base, self.alpha * s, self.beta * s)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        same_base(self, o)?;
        Ok(Self::new(self.base, self.alpha + o.alpha, self.beta + o.beta))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        same_base(self, o)?;
        Ok(Self::new(self.base, self.alpha - o.alpha, self.beta - o.beta))
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }
}

fn same_base(x: &TangentVector, y: &TangentVector) -> Result<()> {
    if x.base.same_as(&y.base) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "tangent vectors live at different base points (distance {:e})",
            x.base.distance(&y.base)
        )))
    }
}

/// Gram matrix of `g` in `(α, β)` coordinates.
pub fn metric_matrix() -> Mat6 {
    let mut m = Mat6::zeros();
    for i in 0..3 {
        m[(i, i)] = 4.0 / 3.0;
        m[(i + 3, i + 3)] = 4.0 / 3.0;
        m[(i, i + 3)] = -2.0 / 3.0;
        m[(i + 3, i)] = -2.0 / 3.0;
    }
    m
}

/// Matrix of `J` acting on `(α, β)` coordinates.
pub fn j_matrix() -> Mat6 {
    let s = 1.0 / 3f64.sqrt();
    let mut m = Mat6::zeros();
    for i in 0..3 {
        m[(i, i)] = -s;
        m[(i, i + 3)] = 2.0 * s;
        m[(i + 3, i)] = -2.0 * s;
        m[(i + 3, i + 3)] = s;
    }
    m
}

pub fn p_matrix() -> Mat6 {
    let mut m = Mat6::zeros();
    for i in 0..3 {
        m[(i, i + 3)] = 1.0;
        m[(i + 3, i)] = 1.0;
    }
    m
}

/// `g` on coordinate 6-vectors; the metric is left-invariant so the base is irrelevant.
pub fn g6(a: &Vec6, b: &Vec6) -> f64 {
    let dot = |x: usize, y: usize| a[x] * b[y] + a[x + 1] * b[y + 1] + a[x + 2] * b[y + 2];
    4.0 / 3.0 * (dot(0, 0) + dot(3, 3)) - 2.0 / 3.0 * (dot(0, 3) + dot(3, 0))
}

pub fn j6(a: &Vec6) -> Vec6 {
    let s = 1.0 / 3f64.sqrt();
    let mut out = Vec6::zeros();
    for i in 0..3 {
        out[i] = s * (2.0 * a[i + 3] - a[i]);
        out[i + 3] = s * (a[i + 3] - 2.0 * a[i]);
    }
    out
}

pub fn p6(a: &Vec6) -> Vec6 {
    Vec6::new(a[3], a[4], a[5], a[0], a[1], a[2])
}

/// `(4/3)(⟨α,α′⟩ + ⟨β,β′⟩) − (2/3)(⟨α,β′⟩ + ⟨α′,β⟩)`.
pub fn metric_g(x: &TangentVector, y: &TangentVector) -> Result<f64> {
    same_base(x, y)?;
    Ok(g6(&x.coords(), &y.coords()))
}

/// The same metric evaluated as `½(⟨X,Y⟩ + ⟨JX,JY⟩)` with the Euclidean product of ℝ⁸.
pub fn metric_g_ambient(x: &TangentVector, y: &TangentVector) -> Result<f64> {
    same_base(x, y)?;
    let e = |a: &TangentVector, b: &TangentVector| {
        let (ua, ub) = (a.ambient(), b.ambient());
        ua[0].dot(ub[0]) + ua[1].dot(ub[1])
    };
    Ok(0.5 * (e(x, y) + e(&apply_j(x), &apply_j(y))))
}

/// `J(pα, qβ) = (p(2β − α), q(β − 2α))/√3`.
pub fn apply_j(x: &TangentVector) -> TangentVector {
    let s = 1.0 / 3f64.sqrt();
    TangentVector::new(x.base, (x.beta * 2.0 - x.alpha) * s, (x.beta - x.alpha * 2.0) * s)
}

/// `P(pα, qβ) = (pβ, qα)`.
pub fn apply_p(x: &TangentVector) -> TangentVector {
    TangentVector::new(x.base, x.beta, x.alpha)
}
