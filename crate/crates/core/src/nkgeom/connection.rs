use super::chart::Chart;
use super::structure::{j6, Mat6, TangentVector, Vec6};
use crate::error::{Error, Result};
use crate::fd::{check_step, richardson};

/// `Γᶜ_ab` at one chart point, indexed `[c][a][b]`.
#[derive(Clone, Debug)]
pub struct Christoffel {
    pub gamma: [[[f64; 6]; 6]; 6],
}

impl Christoffel {
    /// `Γᶜ_ab vᵃ wᵇ`.
    pub fn contract(&self, v: &Vec6, w: &Vec6) -> Vec6 {
        let mut out = Vec6::zeros();
        for c in 0..6 {
            let mut s = 0.0;
            for a in 0..6 {
                for b in 0..6 {
                    s += self.gamma[c][a][b] * v[a] * w[b];
                }
            }
            out[c] = s;
        }
        out
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for c in 0..6 {
            for a in 0..6 {
                for b in 0..6 {
                    m = m.max((self.gamma[c][a][b] - self.gamma[c][b][a]).abs());
                }
            }
        }
        m
    }
}

/// Levi-Civita connection of `g`, realized in exponential charts by central
/// differences of the metric components (step `h` plus one Richardson level).
#[derive(Clone, Copy, Debug)]
pub struct LeviCivita {
    pub step: f64,
}

impl Default for LeviCivita {
    fn default() -> Self {
        Self { step: 1e-4 }
    }
}

impl LeviCivita {
    pub fn new(step: f64) -> Result<Self> {
        check_step(step)?;
        Ok(Self { step })
    }

    pub fn christoffel(&self, ch: &Chart, x: &Vec6) -> Result<Christoffel> {
        check_step(self.step)?;
        let g = ch.metric_components(x)?;
        let ginv = g.try_inverse().ok_or_else(|| Error::Numeric("metric components are singular".into()))?;
        // Probe the radius once so the closure below cannot fail.
        for d in 0..6 {
            ch.metric_components(&(x + Vec6::ith(d, self.step)))?;
            ch.metric_components(&(x - Vec6::ith(d, self.step)))?;
        }
        let dg: Vec<Mat6> = (0..6)
            .map(|d| {
                let e = Vec6::ith(d, 1.0);
                richardson(|t| ch.metric_components(&(x + e * t)).expect("radius probed"), self.step)
            })
            .collect();
        let mut gamma = [[[0.0; 6]; 6]; 6];
        for a in 0..6 {
            for b in a..6 {
                // Γ_dab = ½(∂ₐ g_db + ∂_b g_da − ∂_d g_ab), symmetric in (a, b) by construction.
                let mut lower = [0.0; 6];
                for (d, l) in lower.iter_mut().enumerate() {
                    *l = 0.5 * (dg[a][(d, b)] + dg[b][(d, a)] - dg[d][(a, b)]);
                }
                for c in 0..6 {
                    let s: f64 = (0..6).map(|d| ginv[(c, d)] * lower[d]).sum();
                    gamma[c][a][b] = s;
                    gamma[c][b][a] = s;
                }
            }
        }
        Ok(Christoffel { gamma })
    }

    /// Directional derivative of a coordinate field along `dir` at `x`.
    fn directional(&self, field: &dyn Fn(&Vec6) -> Result<Vec6>, x: &Vec6, dir: &Vec6) -> Result<Vec6> {
        check_step(self.step)?;
        field(&(x + dir * self.step))?;
        field(&(x - dir * self.step))?;
        Ok(richardson(|t| field(&(x + dir * t)).expect("field probed at the outer stencil"), self.step))
    }

    /// `∇̃_V W` in coordinate components at `x`.
    pub fn covariant_derivative_coords(
        &self,
        ch: &Chart,
        v: &dyn Fn(&Vec6) -> Vec6,
        w: &dyn Fn(&Vec6) -> Vec6,
        x: &Vec6,
    ) -> Result<Vec6> {
        let vx = v(x);
        let dw = self.directional(&|y| Ok(w(y)), x, &vx)?;
        let gamma = self.christoffel(ch, x)?;
        Ok(dw + gamma.contract(&vx, &w(x)))
    }

    /// `∇̃_V W` at `chart.point(x)`.
    pub fn covariant_derivative(
        &self,
        ch: &Chart,
        v: &dyn Fn(&Vec6) -> Vec6,
        w: &dyn Fn(&Vec6) -> Vec6,
        x: &Vec6,
    ) -> Result<TangentVector> {
        let c = self.covariant_derivative_coords(ch, v, w, x)?;
        ch.vector(x, &c)
    }

    /// `G(X, Y) = ∇̃_X(JȲ) − J∇̃_X Ȳ`, with `Ȳ` the constant-coordinate extension of `Y`
    /// in the exponential chart centered at the common base point.
    pub fn g_tensor(&self, x: &TangentVector, y: &TangentVector) -> Result<TangentVector> {
        if !x.base.same_as(&y.base) {
            return Err(Error::Domain("G needs vectors at one base point".into()));
        }
        let ch = Chart::centered(x.base);
        let origin = Vec6::zeros();
        // At the origin the pushforward is the identity, so coordinates are (α, β).
        let xv = x.coords();
        let yv = y.coords();
        let jy = |z: &Vec6| -> Result<Vec6> {
            let m = ch.pushforward(z)?;
            let inv = m.try_inverse().ok_or_else(|| Error::Numeric("chart pushforward is singular".into()))?;
            Ok(inv * j6(&(m * yv)))
        };
        let gamma = self.christoffel(&ch, &origin)?;
        let d_jy = self.directional(&jy, &origin, &xv)? + gamma.contract(&xv, &jy(&origin)?);
        let d_y = gamma.contract(&xv, &yv);
        Ok(TangentVector::from_coords(x.base, &(d_jy - j6(&d_y))))
    }

    /// RK4 integration of the geodesic equation in chart coordinates.
    pub fn geodesic(&self, ch: &Chart, x0: &Vec6, v0: &Vec6, t_end: f64, steps: usize) -> Result<Vec<Vec6>> {
        let steps = steps.max(1);
        let dt = t_end / steps as f64;
        let rhs = |x: &Vec6, v: &Vec6| -> Result<(Vec6, Vec6)> {
            let g = self.christoffel(ch, x)?;
            Ok((*v, -g.contract(v, v)))
        };
        let mut path = Vec::with_capacity(steps + 1);
        let (mut x, mut v) = (*x0, *v0);
        path.push(x);
        for _ in 0..steps {
            let (k1x, k1v) = rhs(&x, &v)?;
            let (k2x, k2v) = rhs(&(x + k1x * (dt / 2.0)), &(v + k1v * (dt / 2.0)))?;
            let (k3x, k3v) = rhs(&(x + k2x * (dt / 2.0)), &(v + k2v * (dt / 2.0)))?;
            let (k4x, k4v) = rhs(&(x + k3x * dt), &(v + k3v * dt))?;
            x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dt / 6.0);
            v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0);
            path.push(x);
        }
        Ok(path)
    }
}

pub fn covariant_derivative(
    ch: &Chart,
    v: &dyn Fn(&Vec6) -> Vec6,
    w: &dyn Fn(&Vec6) -> Vec6,
    x: &Vec6,
) -> Result<TangentVector> {
    LeviCivita::default().covariant_derivative(ch, v, w, x)
}

/// `G = ∇̃J` with the default finite-difference connection.
pub fn g_tensor(x: &TangentVector, y: &TangentVector) -> Result<TangentVector> {
    LeviCivita::default().g_tensor(x, y)
}
