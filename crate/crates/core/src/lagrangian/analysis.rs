use std::f64::consts::FRAC_PI_2;

use nalgebra::{Cholesky, Matrix3, Vector3};
use serde::Serialize;

use super::angles::{angle_connection_residual, angle_functions, dist_mod_pi, mat_to_rows, AngleData};
use super::immersion::{vec3, Immersion, Param};
use crate::error::{Error, Result};
use crate::fd::check_step;
use crate::nkgeom::{g6, j6, levi_civita, p6, Chart, LeviCivita, PointS3S3, TangentVector, Vec6};

pub type Cubic = [[[f64; 3]; 3]; 3];

/// Parameter derivatives of the adapted rotation and of the angles.
type AdaptedDerivatives = ([Matrix3<f64>; 3], [[f64; 3]; 3]);

fn g_norm(v: &Vec6) -> f64 {
    g6(v, v).max(0.0).sqrt()
}

fn cubic_max_abs(c: &Cubic) -> f64 {
    c.iter().flatten().flatten().fold(0.0, |m: f64, x| m.max(x.abs()))
}

fn frobenius(c: &Cubic) -> f64 {
    c.iter().flatten().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// `out_ijk = Σ R_ia R_jb R_kc c_abc`.
fn rotate_cubic(r: &Matrix3<f64>, c: &Cubic) -> Cubic {
    let mut out = [[[0.0; 3]; 3]; 3];
    for (i, oi) in out.iter_mut().enumerate() {
        for (j, oij) in oi.iter_mut().enumerate() {
            for (k, o) in oij.iter_mut().enumerate() {
                let mut s = 0.0;
                for (a, ca) in c.iter().enumerate() {
                    for (b, cab) in ca.iter().enumerate() {
                        for (cc, x) in cab.iter().enumerate() {
                            s += r[(i, a)] * r[(j, b)] * r[(k, cc)] * x;
                        }
                    }
                }
                *o = s;
            }
        }
    }
    out
}

/// Max deviation of `c_abc` from `c_bac` and from `c_acb`.
pub fn symmetry_residual(c: &Cubic) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for k in 0..3 {
                worst = worst.max((c[a][b][k] - c[b][a][k]).abs());
                worst = worst.max((c[a][b][k] - c[a][k][b]).abs());
            }
        }
    }
    worst
}

/// Pushforward, Gram–Schmidt frame and (optionally) `∇̃_{Fᵢ}Fⱼ` at one parameter point.
/// `E_a = Σᵢ C_ai Fᵢ` with `C` lower triangular.
#[derive(Clone, Debug)]
struct Jet {
    point: PointS3S3,
    f: [Vec6; 3],
    c: Matrix3<f64>,
    e: [Vec6; 3],
    hess: Option<[[Vec6; 3]; 3]>,
}

impl Jet {
    fn hess(&self) -> &[[Vec6; 3]; 3] {
        self.hess.as_ref().expect("jet built with second derivatives")
    }

    fn lagrangian_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                worst = worst.max(g6(&j6(&self.e[a]), &self.e[b]).abs());
            }
        }
        worst
    }

    /// `∇̃_{E_a}E_b` as a coordinate vector.
    fn frame_derivative(&self, a: usize, b: usize, dc: &[Matrix3<f64>; 3]) -> Vec6 {
        let hess = self.hess();
        let mut out = Vec6::zeros();
        for m in 0..3 {
            // E_a(C_bm) = Σ_n C_an ∂_n C_bm
            let d: f64 = (0..3).map(|n| self.c[(a, n)] * dc[n][(b, m)]).sum();
            out += self.f[m] * d;
            for n in 0..3 {
                out += hess[n][m] * (self.c[(a, n)] * self.c[(b, m)]);
            }
        }
        out
    }

    /// `∂_n C` from the Cholesky derivative: `∂C = −Φ(C ∂G Cᵀ) C`.
    fn frame_coefficient_derivatives(&self) -> [Matrix3<f64>; 3] {
        let hess = self.hess();
        std::array::from_fn(|n| {
            let dg = Matrix3::from_fn(|i, j| g6(&hess[n][i], &self.f[j]) + g6(&self.f[i], &hess[n][j]));
            let mut phi = self.c * dg * self.c.transpose();
            for i in 0..3 {
                for j in 0..3 {
                    if j > i {
                        phi[(i, j)] = 0.0;
                    } else if i == j {
                        phi[(i, j)] *= 0.5;
                    }
                }
            }
            -(phi * self.c)
        })
    }

    fn cubic(&self) -> Cubic {
        let hess = self.hess();
        let mut out = [[[0.0; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let mut nab = Vec6::zeros();
                for i in 0..3 {
                    for j in 0..3 {
                        nab += hess[i][j] * (self.c[(a, i)] * self.c[(b, j)]);
                    }
                }
                for k in 0..3 {
                    out[a][b][k] = g6(&nab, &j6(&self.e[k]));
                }
            }
        }
        out
    }

    /// `ω_ab^c = g(∇̃_{E_a}E_b, E_c)` in the Gram–Schmidt frame.
    fn omega(&self) -> Cubic {
        let dc = self.frame_coefficient_derivatives();
        let mut out = [[[0.0; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let d = self.frame_derivative(a, b, &dc);
                for k in 0..3 {
                    out[a][b][k] = g6(&d, &self.e[k]);
                }
            }
        }
        out
    }

    fn ab(&self) -> (Matrix3<f64>, Matrix3<f64>) {
        let pe: [Vec6; 3] = std::array::from_fn(|a| p6(&self.e[a]));
        let a = Matrix3::from_fn(|i, j| g6(&pe[i], &self.e[j]));
        let b = Matrix3::from_fn(|i, j| g6(&pe[i], &j6(&self.e[j])));
        (a, b)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LagrangianCheck {
    pub residual: f64,
    pub is_lagrangian: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SecondFundamentalForm {
    /// `c_abc = g(h(E_a, E_b), JE_c)` in the Gram–Schmidt frame.
    pub cubic: Cubic,
    /// Components of `H` along `JE_c`.
    pub mean_curvature: [f64; 3],
    pub mean_curvature_norm: f64,
    pub norm: f64,
    pub symmetry_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbOperators {
    pub a: [[f64; 3]; 3],
    pub b: [[f64; 3]; 3],
    /// `max_a ‖PE_a − AE_a − JBE_a‖`.
    pub decomposition_residual: f64,
    pub symmetry_residual: f64,
    pub commutator: f64,
    /// `‖A² + B² − Id‖_max`.
    pub pythagoras_residual: f64,
}

impl AbOperators {
    pub fn a_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.a[i][j])
    }

    pub fn b_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.b[i][j])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdaptedFrameData {
    pub u: Param,
    /// `(p, q)` as `[w, x, y, z]` each.
    pub point: [[f64; 4]; 2],
    /// `(α, β)` coordinates of E₁, E₂, E₃.
    pub frame: [[f64; 6]; 3],
    pub theta: [f64; 3],
    pub a: [[f64; 3]; 3],
    pub b: [[f64; 3]; 3],
    pub h: Cubic,
    pub omega: Cubic,
    pub mean_curvature: [f64; 3],
    pub degenerate: bool,
    pub orthonormality_residual: f64,
    pub angle_sum_residual: f64,
    /// Max of `‖G(E_i,E_j) + (1/√3)Σ_k ε_ijk JE_k‖` after orientation fixing.
    pub orientation_residual: f64,
    pub orientation_flipped: bool,
    pub angle_connection_residual: Option<f64>,
    pub angle_derivative_residual: Option<f64>,
}

impl AdaptedFrameData {
    pub fn frame_vectors(&self) -> Result<[TangentVector; 3]> {
        let base = PointS3S3::new(
            crate::quat::Quaternion::from_array(self.point[0]),
            crate::quat::Quaternion::from_array(self.point[1]),
        )?;
        Ok(self.frame.map(|c| TangentVector::from_coords(base, &Vec6::from(c))))
    }
}

/// Finite-difference analyzer for immersions into S³×S³.
#[derive(Clone, Copy, Debug)]
pub struct Analyzer {
    pub connection: LeviCivita,
    /// Step for second derivatives of the map.
    pub hessian_step: f64,
    /// Step for derivatives of frame-level quantities along the parameter domain.
    pub outer_step: f64,
    /// Lagrangian residual accepted by the preconditions of the downstream operations.
    pub lagrangian_tol: f64,
}

impl Default for Analyzer {
    fn default() -> Self {
        Self { connection: LeviCivita::default(), hessian_step: 1e-3, outer_step: 1e-2, lagrangian_tol: 1e-6 }
    }
}

impl Analyzer {
    fn jet(&self, imm: &Immersion, u: &Param, second: bool) -> Result<Jet> {
        let point = imm.point(u)?;
        let f = imm.pushforward(u)?;
        let gram = imm.gram(u)?;
        let chol =
            Cholesky::new(gram).ok_or_else(|| Error::Numeric("induced metric is not positive definite".into()))?;
        let c = chol.l().try_inverse().ok_or_else(|| Error::Numeric("Gram–Schmidt factor is singular".into()))?;
        let e = std::array::from_fn(|a| (0..3).fold(Vec6::zeros(), |acc, i| acc + f[i] * c[(a, i)]));
        let hess = if second { Some(self.covariant_hessian(imm, u, &point, &f)?) } else { None };
        Ok(Jet { point, f, c, e, hess })
    }

    /// `∇̃_{Fᵢ}Fⱼ` at `u`: second derivatives in the chart centered at `f(u)` plus `Γ(0)(Fᵢ, Fⱼ)`.
    fn covariant_hessian(
        &self,
        imm: &Immersion,
        u: &Param,
        point: &PointS3S3,
        f: &[Vec6; 3],
    ) -> Result<[[Vec6; 3]; 3]> {
        check_step(self.hessian_step)?;
        let chart = Chart::centered(*point);
        let y = |w: [f64; 3]| imm.local_coords(&chart, u, &w);
        let y0 = y([0.0; 3])?;
        let h = self.hessian_step;
        let mut out = [[Vec6::zeros(); 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let d = |s: f64| -> Result<Vec6> {
                    if i == j {
                        let mut p = [0.0; 3];
                        p[i] = s;
                        let mut m = [0.0; 3];
                        m[i] = -s;
                        Ok((y(p)? - y0 * 2.0 + y(m)?) / (s * s))
                    } else {
                        let at = |a: f64, b: f64| {
                            let mut w = [0.0; 3];
                            w[i] = a;
                            w[j] = b;
                            y(w)
                        };
                        Ok((at(s, s)? - at(s, -s)? - at(-s, s)? + at(-s, -s)?) / (4.0 * s * s))
                    }
                };
                let v = (d(h / 2.0)? * 4.0 - d(h)?) / 3.0;
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        let gamma = self.connection.christoffel(&chart, &Vec6::zeros())?;
        for i in 0..3 {
            for j in i..3 {
                let v = out[i][j] + gamma.contract(&f[i], &f[j]);
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        Ok(out)
    }

    fn require_domain(imm: &Immersion, u: &Param) -> Result<()> {
        if u.iter().any(|x| !x.is_finite()) || !imm.contains(u) {
            return Err(Error::Domain(format!("{u:?} is outside the domain of {}", imm.label())));
        }
        Ok(())
    }

    fn lagrangian_jet(&self, imm: &Immersion, u: &Param, second: bool) -> Result<Jet> {
        Self::require_domain(imm, u)?;
        let jet = self.jet(imm, u, second)?;
        let r = jet.lagrangian_residual();
        if !(r < self.lagrangian_tol) {
            return Err(Error::Precondition(format!("{} is not Lagrangian at {u:?} (residual {r:e})", imm.label())));
        }
        Ok(jet)
    }

    pub fn is_lagrangian(&self, imm: &Immersion, u: &Param, tol: f64) -> Result<LagrangianCheck> {
        Self::require_domain(imm, u)?;
        let residual = self.jet(imm, u, false)?.lagrangian_residual();
        Ok(LagrangianCheck { residual, is_lagrangian: residual < tol })
    }

    pub fn second_fundamental_form(&self, imm: &Immersion, u: &Param) -> Result<SecondFundamentalForm> {
        let jet = self.lagrangian_jet(imm, u, true)?;
        Ok(sff_from_cubic(jet.cubic()))
    }

    pub fn ab_operators(&self, imm: &Immersion, u: &Param) -> Result<AbOperators> {
        let jet = self.lagrangian_jet(imm, u, false)?;
        Ok(ab_report(&jet))
    }

    /// Adapted frame, angles, `h_ij^k`, `ω_ij^k` and the per-point relation checks.
    ///
    /// When the angles are degenerate the adapted frame is extended with constant
    /// coefficients against the Gram–Schmidt frame, and the relation checks are skipped.
    pub fn frame_components(&self, imm: &Immersion, u: &Param) -> Result<AdaptedFrameData> {
        let jet = self.lagrangian_jet(imm, u, true)?;
        let (a, b) = jet.ab();
        let angles = angle_functions(&a, &b)?;
        let mut r = angles.rotation();

        let g_gs = self.g_in_frame(&jet)?;
        let g_ad = |r: &Matrix3<f64>, i: usize, j: usize| -> Vec6 {
            let mut s = Vec6::zeros();
            for x in 0..3 {
                for y in 0..3 {
                    s += g_gs[x][y] * (r[(i, x)] * r[(j, y)]);
                }
            }
            s
        };
        let e_ad = |r: &Matrix3<f64>| -> [Vec6; 3] {
            std::array::from_fn(|i| (0..3).fold(Vec6::zeros(), |acc, x| acc + jet.e[x] * r[(i, x)]))
        };
        let sigma = g6(&g_ad(&r, 0, 1), &j6(&e_ad(&r)[2]));
        let flipped = sigma > 0.0;
        if flipped {
            for x in 0..3 {
                r[(2, x)] = -r[(2, x)];
            }
        }
        let e = e_ad(&r);
        let inv_sqrt3 = 1.0 / 3f64.sqrt();
        let mut orientation_residual: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut v = g_ad(&r, i, j);
                for (k, ek) in e.iter().enumerate() {
                    v += j6(ek) * (inv_sqrt3 * f64::from(levi_civita(i, j, k)));
                }
                orientation_residual = orientation_residual.max(g_norm(&v));
            }
        }

        let cubic_gs = jet.cubic();
        let h = rotate_cubic(&r, &cubic_gs);
        let mut omega = rotate_cubic(&r, &jet.omega());
        let mut angle_deriv = None;
        let mut angle_conn = None;
        if !angles.degenerate {
            let (dr, dtheta) = self.adapted_derivatives(imm, u, &jet, &r, &angles)?;
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        omega[i][j][k] += (0..3).map(|x| dr[i][(j, x)] * r[(k, x)]).sum::<f64>();
                    }
                }
            }
            let mut worst: f64 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    worst = worst.max((dtheta[i][j] + h[j][j][i]).abs());
                }
            }
            angle_deriv = Some(worst);
            angle_conn = Some(angle_connection_residual(&angles.theta, &h, &omega));
        }

        let ar = r * a * r.transpose();
        let br = r * b * r.transpose();
        let gram = Matrix3::from_fn(|i, j| g6(&e[i], &e[j]));
        let orth = (gram - Matrix3::identity()).amax();
        let sff = sff_from_cubic(h);
        let (p, q) = (jet.point.p(), jet.point.q());
        Ok(AdaptedFrameData {
            u: *u,
            point: [p.to_array(), q.to_array()],
            frame: e.map(|v| [v[0], v[1], v[2], v[3], v[4], v[5]]),
            theta: angles.theta,
            a: mat_to_rows(&ar),
            b: mat_to_rows(&br),
            h,
            omega,
            mean_curvature: sff.mean_curvature,
            degenerate: angles.degenerate,
            orthonormality_residual: orth,
            angle_sum_residual: angles.angle_sum_residual(),
            orientation_residual,
            orientation_flipped: flipped,
            angle_connection_residual: angle_conn,
            angle_derivative_residual: angle_deriv,
        })
    }

    /// `G(e_a, e_b)` on the Gram–Schmidt frame.
    fn g_in_frame(&self, jet: &Jet) -> Result<[[Vec6; 3]; 3]> {
        let tv: [TangentVector; 3] = jet.e.map(|c| TangentVector::from_coords(jet.point, &c));
        let mut out = [[Vec6::zeros(); 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                out[a][b] = self.connection.g_tensor(&tv[a], &tv[b])?.coords();
            }
        }
        Ok(out)
    }

    /// Derivatives of the adapted rotation and of the angles along the adapted frame:
    /// `dr[i] = E_i(R)` and `dtheta[i][j] = E_i(θⱼ)`.
    fn adapted_derivatives(
        &self,
        imm: &Immersion,
        u: &Param,
        jet: &Jet,
        r: &Matrix3<f64>,
        angles: &AngleData,
    ) -> Result<AdaptedDerivatives> {
        check_step(self.outer_step)?;
        let rc = r * jet.c;
        let sample = |t: f64, dir: &Vector3<f64>| -> Result<(Matrix3<f64>, [f64; 3])> {
            let w = Vector3::from(*u) + dir * t;
            let nb = self.jet(imm, &vec3(&w), false)?;
            let (na, nbm) = nb.ab();
            let nd = angle_functions(&na, &nbm)?;
            let nr = nd.rotation();
            // Match each center eigenvector with its continuation and align signs.
            let mut out = Matrix3::zeros();
            let mut th = [0.0; 3];
            for i in 0..3 {
                let ri = r.row(i);
                let (best, dot) = (0..3)
                    .map(|k| (k, ri.dot(&nr.row(k))))
                    .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
                    .expect("three rows");
                let sign = if dot < 0.0 { -1.0 } else { 1.0 };
                out.set_row(i, &(nr.row(best) * sign));
                let mut d = nd.theta[best] - angles.theta[i];
                while d > FRAC_PI_2 {
                    d -= std::f64::consts::PI;
                }
                while d <= -FRAC_PI_2 {
                    d += std::f64::consts::PI;
                }
                th[i] = angles.theta[i] + d;
            }
            Ok((out, th))
        };
        let s = self.outer_step;
        let mut dr = [Matrix3::zeros(); 3];
        let mut dth = [[0.0; 3]; 3];
        for i in 0..3 {
            let dir = rc.row(i).transpose();
            let diff = |h: f64| -> Result<(Matrix3<f64>, [f64; 3])> {
                let (rp, tp) = sample(h, &dir)?;
                let (rm, tm) = sample(-h, &dir)?;
                Ok(((rp - rm) / (2.0 * h), std::array::from_fn(|j| (tp[j] - tm[j]) / (2.0 * h))))
            };
            let (r1, t1) = diff(s)?;
            let (r2, t2) = diff(s / 2.0)?;
            dr[i] = (r2 * 4.0 - r1) / 3.0;
            dth[i] = std::array::from_fn(|j| (4.0 * t2[j] - t1[j]) / 3.0);
        }
        Ok((dr, dth))
    }

    /// Max component of the Codazzi defect over all frame index quadruples,
    /// evaluated in the Gram–Schmidt frame.
    pub fn codazzi_residual(&self, imm: &Immersion, u: &Param) -> Result<f64> {
        let jet = self.lagrangian_jet(imm, u, true)?;
        check_step(self.outer_step)?;
        let c = jet.cubic();
        let omega = jet.omega();
        let (a, b) = jet.ab();
        let g = self.g_in_frame(&jet)?;
        let gc: Cubic =
            std::array::from_fn(|i| std::array::from_fn(|m| std::array::from_fn(|l| g6(&g[i][m], &j6(&jet.e[l])))));

        // ∂_n c_jkl by extrapolated central differences of the frame-level cubic.
        let s = self.outer_step;
        let cubic_at = |n: usize, t: f64| -> Result<Cubic> {
            let mut w = *u;
            w[n] += t;
            Ok(self.jet(imm, &w, true)?.cubic())
        };
        let mut dcub = [[[[0.0; 3]; 3]; 3]; 3];
        for (n, dn) in dcub.iter_mut().enumerate() {
            let (p1, m1, p2, m2) = (cubic_at(n, s)?, cubic_at(n, -s)?, cubic_at(n, s / 2.0)?, cubic_at(n, -s / 2.0)?);
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let d1 = (p1[j][k][l] - m1[j][k][l]) / (2.0 * s);
                        let d2 = (p2[j][k][l] - m2[j][k][l]) / s;
                        dn[j][k][l] = (4.0 * d2 - d1) / 3.0;
                    }
                }
            }
        }

        let t = |i: usize, j: usize, k: usize, l: usize| -> f64 {
            let mut v: f64 = (0..3).map(|n| jet.c[(i, n)] * dcub[n][j][k][l]).sum();
            for m in 0..3 {
                v += c[j][k][m] * (omega[i][m][l] + gc[i][m][l]);
                v -= omega[i][j][m] * c[m][k][l];
                v -= omega[i][k][m] * c[j][m][l];
            }
            v
        };
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let rhs = (a[(j, k)] * b[(i, l)] - a[(i, k)] * b[(j, l)] - b[(j, k)] * a[(i, l)]
                            + b[(i, k)] * a[(j, l)])
                            / 3.0;
                        worst = worst.max((t(i, j, k, l) - t(j, i, k, l) - rhs).abs());
                    }
                }
            }
        }
        Ok(worst)
    }
}

fn sff_from_cubic(cubic: Cubic) -> SecondFundamentalForm {
    let mean_curvature: [f64; 3] = std::array::from_fn(|k| (0..3).map(|a| cubic[a][a][k]).sum::<f64>() / 3.0);
    SecondFundamentalForm {
        mean_curvature_norm: mean_curvature.iter().map(|x| x * x).sum::<f64>().sqrt(),
        mean_curvature,
        norm: frobenius(&cubic),
        symmetry_residual: symmetry_residual(&cubic),
        cubic,
    }
}

fn ab_report(jet: &Jet) -> AbOperators {
    let (a, b) = jet.ab();
    let mut decomposition: f64 = 0.0;
    for i in 0..3 {
        let mut v = p6(&jet.e[i]);
        let mut bx = Vec6::zeros();
        for k in 0..3 {
            v -= jet.e[k] * a[(i, k)];
            bx += jet.e[k] * b[(i, k)];
        }
        v -= j6(&bx);
        decomposition = decomposition.max(g_norm(&v));
    }
    AbOperators {
        a: mat_to_rows(&a),
        b: mat_to_rows(&b),
        decomposition_residual: decomposition,
        symmetry_residual: (a - a.transpose()).amax().max((b - b.transpose()).amax()),
        commutator: (a * b - b * a).amax(),
        pythagoras_residual: (a * a + b * b - Matrix3::identity()).amax(),
    }
}

/// Largest entry of a cubic tensor in absolute value.
pub fn cubic_max(c: &Cubic) -> f64 {
    cubic_max_abs(c)
}

/// Standalone angle-function extraction re-exported for callers holding `A`, `B`.
pub fn angles_of(ab: &AbOperators) -> Result<AngleData> {
    angle_functions(&ab.a_matrix(), &ab.b_matrix())
}

/// Mod-π residual of an angle sum.
pub fn angle_sum_residual(theta: &[f64; 3]) -> f64 {
    dist_mod_pi(theta.iter().sum())
}
