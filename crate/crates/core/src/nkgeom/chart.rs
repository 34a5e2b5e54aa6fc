use std::f64::consts::PI;

use super::structure::{g6, metric_matrix, Mat6, PointS3S3, TangentVector, Vec6};
use crate::error::{Error, Result};
use crate::quat::{exp_im, log_unit, ImaginaryQuaternion};

/// Per-factor radius limit, inside the injectivity radius of `exp` on S³.
pub const MAX_CHART_RADIUS: f64 = PI - 0.1;

/// Exponential chart `x ↦ (p·exp(Σ xₐeₐ), q·exp(Σ x₃₊ₐfₐ))` centered at `base`.
#[derive(Clone, Copy, Debug)]
pub struct Chart {
    base: PointS3S3,
    basis_p: [ImaginaryQuaternion; 3],
    basis_q: [ImaginaryQuaternion; 3],
}

impl Chart {
    pub fn centered(base: PointS3S3) -> Self {
        let std = [ImaginaryQuaternion::I, ImaginaryQuaternion::J, ImaginaryQuaternion::K];
        Self { base, basis_p: std, basis_q: std }
    }

    pub fn with_basis(
        base: PointS3S3,
        basis_p: [ImaginaryQuaternion; 3],
        basis_q: [ImaginaryQuaternion; 3],
    ) -> Result<Self> {
        for b in [&basis_p, &basis_q] {
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    if (b[i].dot(b[j]) - want).abs() > 1e-12 {
                        return Err(Error::Domain("chart basis must be orthonormal".into()));
                    }
                }
            }
        }
        Ok(Self { base, basis_p, basis_q })
    }

    pub fn base(&self) -> PointS3S3 {
        self.base
    }

    fn xi(&self, x: &Vec6) -> (ImaginaryQuaternion, ImaginaryQuaternion) {
        let mut a = ImaginaryQuaternion::ZERO;
        let mut b = ImaginaryQuaternion::ZERO;
        for k in 0..3 {
            a = a + self.basis_p[k] * x[k];
            b = b + self.basis_q[k] * x[k + 3];
        }
        (a, b)
    }

    fn check_radius(x: &Vec6) -> Result<()> {
        let rp = x.fixed_rows::<3>(0).norm();
        let rq = x.fixed_rows::<3>(3).norm();
        if !(rp < MAX_CHART_RADIUS && rq < MAX_CHART_RADIUS) {
            return Err(Error::Domain(format!(
                "chart coordinates exceed radius {MAX_CHART_RADIUS:.4} (|x_p| = {rp:.4}, |x_q| = {rq:.4})"
            )));
        }
        Ok(())
    }

    pub fn point(&self, x: &Vec6) -> Result<PointS3S3> {
        Self::check_radius(x)?;
        let (a, b) = self.xi(x);
        let p = self.base.p() * exp_im(a);
        let q = self.base.q() * exp_im(b);
        // exp and the product keep unit norm to rounding; renormalize anyway.
        PointS3S3::new(p.normalized()?, q.normalized()?)
    }

    /// Inverse of [`Chart::point`].
    pub fn coords(&self, pt: &PointS3S3) -> Result<Vec6> {
        let a = log_unit(self.base.p().conj() * pt.p())?;
        let b = log_unit(self.base.q().conj() * pt.q())?;
        let mut x = Vec6::zeros();
        for k in 0..3 {
            x[k] = a.dot(self.basis_p[k]);
            x[k + 3] = b.dot(self.basis_q[k]);
        }
        Ok(x)
    }

    /// Columns are the coordinate vectors `∂ₐ` at `x`, as `(α, β)` pairs.
    pub fn pushforward(&self, x: &Vec6) -> Result<Mat6> {
        Self::check_radius(x)?;
        let (a, b) = self.xi(x);
        let mut m = Mat6::zeros();
        for k in 0..3 {
            let da = dexp_left(a, self.basis_p[k]);
            let db = dexp_left(b, self.basis_q[k]);
            m[(0, k)] = da.x;
            m[(1, k)] = da.y;
            m[(2, k)] = da.z;
            m[(3, k + 3)] = db.x;
            m[(4, k + 3)] = db.y;
            m[(5, k + 3)] = db.z;
        }
        Ok(m)
    }

    pub fn coordinate_vectors(&self, x: &Vec6) -> Result<[TangentVector; 6]> {
        let pt = self.point(x)?;
        let m = self.pushforward(x)?;
        Ok(std::array::from_fn(|a| TangentVector::from_coords(pt, &m.column(a).into_owned())))
    }

    /// `g_ab(x) = g(∂ₐ, ∂_b)`.
    pub fn metric_components(&self, x: &Vec6) -> Result<Mat6> {
        let m = self.pushforward(x)?;
        Ok(m.transpose() * metric_matrix() * m)
    }

    /// Tangent vector at the chart point with the given coordinate components.
    pub fn vector(&self, x: &Vec6, comps: &Vec6) -> Result<TangentVector> {
        let pt = self.point(x)?;
        Ok(TangentVector::from_coords(pt, &(self.pushforward(x)? * comps)))
    }

    /// Coordinate components of a tangent vector at `chart.point(x)`.
    pub fn components(&self, x: &Vec6, v: &TangentVector) -> Result<Vec6> {
        let m = self.pushforward(x)?;
        let inv = m.try_inverse().ok_or_else(|| Error::Numeric("chart pushforward is singular".into()))?;
        Ok(inv * v.coords())
    }
}

/// Left-trivialized differential of `exp` on S³: `exp(−ξ)·D exp(ξ)[η]`.
pub fn dexp_left(xi: ImaginaryQuaternion, eta: ImaginaryQuaternion) -> ImaginaryQuaternion {
    let t = xi.norm();
    let cross = xi.cross(eta);
    if t < 1e-6 {
        // η − (1 − |ξ|²/3)·ξ×η − (2/3)(|ξ|²η − (ξ·η)ξ) + O(|ξ|⁴)
        let perp = eta * (t * t) - xi * xi.dot(eta);
        return eta - cross * (1.0 - t * t / 3.0) - perp * (2.0 / 3.0);
    }
    let u = xi * (1.0 / t);
    let par = u * u.dot(eta);
    let perp = eta - par;
    let s = t.sin();
    par + perp * ((2.0 * t).sin() / (2.0 * t)) - cross * (s * s / (t * t))
}

/// Norm of a coordinate vector under the chart metric at `x`.
pub fn coordinate_norm(ch: &Chart, x: &Vec6, v: &Vec6) -> Result<f64> {
    let m = ch.pushforward(x)?;
    let w = m * v;
    Ok(g6(&w, &w).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::richardson;
    use crate::quat::Quaternion;
    use nalgebra::SVector;
    use proptest::prelude::*;

    fn base() -> PointS3S3 {
        PointS3S3::new(
            exp_im(ImaginaryQuaternion::new(0.3, -0.2, 0.5)),
            exp_im(ImaginaryQuaternion::new(-0.7, 0.1, 0.4)),
        )
        .unwrap()
    }

    #[test]
    fn origin_maps_to_base() {
        let ch = Chart::centered(base());
        assert!(ch.point(&Vec6::zeros()).unwrap().same_as(&base()));
    }

    #[test]
    fn pushforward_at_origin_is_standard_basis() {
        let ch = Chart::centered(base());
        let m = ch.pushforward(&Vec6::zeros()).unwrap();
        assert!((m - Mat6::identity()).norm() < 1e-10);
    }

    #[test]
    fn radius_limit_enforced() {
        let ch = Chart::centered(base());
        let x = Vec6::new(3.1, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(matches!(ch.point(&x), Err(Error::Domain(_))));
    }

    #[test]
    fn dexp_matches_finite_differences() {
        for (xi, eta) in [
            ([0.4, -1.1, 0.8], [0.2, 0.9, -0.5]),
            ([2.0, 0.3, -0.2], [-1.0, 0.0, 0.7]),
            ([1e-8, 2e-8, 0.0], [0.3, 0.1, 1.0]),
        ] {
            let xi = ImaginaryQuaternion::from_array(xi);
            let eta = ImaginaryQuaternion::from_array(eta);
            let d = richardson(|t| SVector::<f64, 4>::from(exp_im(xi + eta * t).to_array()), 1e-4);
            let q = Quaternion::from_array([d[0], d[1], d[2], d[3]]);
            let left = exp_im(xi).conj() * q;
            let want = dexp_left(xi, eta);
            assert!(left.w.abs() < 1e-10);
            assert!((left.imag() - want).norm() < 1e-10, "{left:?} vs {want:?}");
        }
    }

    proptest! {
        #[test]
        fn coords_invert_point(c in prop::array::uniform6(-0.28f64..0.28)) {
            let ch = Chart::centered(base());
            let x = Vec6::from_row_slice(&c);
            let back = ch.coords(&ch.point(&x).unwrap()).unwrap();
            prop_assert!((back - x).norm() < 1e-10);
        }

        #[test]
        fn pushforward_matches_difference_quotients(c in prop::array::uniform6(-1.0f64..1.0), dir in 0usize..6) {
            let ch = Chart::centered(base());
            let x = Vec6::from_row_slice(&c);
            let pt = ch.point(&x).unwrap();
            let e = Vec6::ith(dir, 1.0);
            let d = richardson(|t| {
                let y = ch.point(&(x + e * t)).unwrap();
                SVector::<f64, 8>::from_iterator(y.p().to_array().into_iter().chain(y.q().to_array()))
            }, 1e-4);
            let tv = TangentVector::from_coords(pt, &ch.pushforward(&x).unwrap().column(dir).into_owned());
            let amb = tv.ambient();
            for k in 0..4 {
                prop_assert!((amb[0].to_array()[k] - d[k]).abs() < 1e-9);
                prop_assert!((amb[1].to_array()[k] - d[k + 4]).abs() < 1e-9);
            }
        }
    }
}
