use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, SVector};

use crate::error::{Error, Result};
use crate::fd::richardson;
use crate::nkgeom::{g6, Chart, PointS3S3, TangentVector, Vec6};

pub type Param = [f64; 3];
type MapFn = dyn Fn(&Param) -> Result<PointS3S3> + Send + Sync;
type JacobianFn = dyn Fn(&Param) -> Result<[TangentVector; 3]> + Send + Sync;

/// Smallest admissible eigenvalue of the induced Gram matrix.
pub const RANK_TOL: f64 = 1e-6;
/// Central-difference step for the pushforward when no Jacobian is supplied.
pub const PUSHFORWARD_STEP: f64 = 1e-5;

/// A parametrized map from a box in ℝ³ into S³×S³.
#[derive(Clone)]
pub struct Immersion {
    label: String,
    domain: [[f64; 2]; 3],
    map: Arc<MapFn>,
    jacobian: Option<Arc<JacobianFn>>,
}

impl fmt::Debug for Immersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Immersion")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl Immersion {
    pub fn new(
        label: impl Into<String>,
        domain: [[f64; 2]; 3],
        map: impl Fn(&Param) -> Result<PointS3S3> + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), domain, map: Arc::new(map), jacobian: None }
    }

    pub fn with_jacobian(mut self, jac: impl Fn(&Param) -> Result<[TangentVector; 3]> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(jac));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> [[f64; 2]; 3] {
        self.domain
    }

    pub fn contains(&self, u: &Param) -> bool {
        (0..3).all(|i| u[i] >= self.domain[i][0] && u[i] <= self.domain[i][1])
    }

    pub fn point(&self, u: &Param) -> Result<PointS3S3> {
        (self.map)(u)
    }

    /// `n³` points on a uniform grid of the domain box (a single center point when `n = 1`).
    pub fn grid(&self, n: usize) -> Vec<Param> {
        let n = n.max(1);
        let coord = |axis: usize, k: usize| {
            let [lo, hi] = self.domain[axis];
            if n == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    out.push([coord(0, a), coord(1, b), coord(2, c)]);
                }
            }
        }
        out
    }

    /// Chart coordinates of `f(u + w)` in the exponential chart centered at `f(u)`.
    pub(crate) fn local_coords(&self, chart: &Chart, u: &Param, w: &Param) -> Result<Vec6> {
        let pt = self.point(&[u[0] + w[0], u[1] + w[1], u[2] + w[2]])?;
        chart.coords(&pt)
    }

    /// `∂ᵢf(u)` as `(α, β)` coordinate vectors, analytic when a Jacobian was supplied.
    pub fn pushforward(&self, u: &Param) -> Result<[Vec6; 3]> {
        if let Some(jac) = &self.jacobian {
            let j = jac(u)?;
            return Ok([j[0].coords(), j[1].coords(), j[2].coords()]);
        }
        let chart = Chart::centered(self.point(u)?);
        let mut out = [Vec6::zeros(); 3];
        for (i, slot) in out.iter_mut().enumerate() {
            let h = PUSHFORWARD_STEP;
            for s in [h, -h, h / 2.0, -h / 2.0] {
                let mut w = [0.0; 3];
                w[i] = s;
                self.local_coords(&chart, u, &w)?;
            }
            *slot = richardson(
                |t| {
                    let mut w = [0.0; 3];
                    w[i] = t;
                    self.local_coords(&chart, u, &w).expect("probed")
                },
                h,
            );
        }
        Ok(out)
    }

    /// Induced Gram matrix `g(∂ᵢf, ∂ⱼf)`; errors if its smallest eigenvalue is below [`RANK_TOL`].
    pub fn gram(&self, u: &Param) -> Result<Matrix3<f64>> {
        let f = self.pushforward(u)?;
        let gram = Matrix3::from_fn(|i, j| g6(&f[i], &f[j]));
        let min = gram.symmetric_eigenvalues().min();
        if !(min > RANK_TOL) {
            return Err(Error::Domain(format!(
                "pushforward of {} is rank deficient at {u:?} (smallest Gram eigenvalue {min:e})",
                self.label
            )));
        }
        Ok(gram)
    }
}

pub(crate) fn vec3(v: &SVector<f64, 3>) -> Param {
    [v[0], v[1], v[2]]
}
