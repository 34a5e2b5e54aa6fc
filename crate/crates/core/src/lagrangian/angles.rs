use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nkgeom::levi_civita;

/// Joint eigenvalue gap below which two angle pairs count as equal.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Largest admissible `‖AB − BA‖`.
pub const COMMUTATOR_TOL: f64 = 1e-6;

/// Distance from `x` to the nearest integer multiple of π.
pub fn dist_mod_pi(x: f64) -> f64 {
    let r = x.rem_euclid(PI);
    r.min(PI - r)
}

/// Angles, simultaneous eigenframe and degeneracy flag of a pair `(A, B)`.
#[derive(Clone, Debug, Serialize)]
pub struct AngleData {
    /// θᵢ in `[0, π)`.
    pub theta: [f64; 3],
    /// Row `i` is the eigenvector `eᵢ` in the coordinates of the input frame.
    pub frame: [[f64; 3]; 3],
    pub degenerate: bool,
}

impl AngleData {
    pub fn rotation(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.frame[i][j])
    }

    /// `(θ₁+θ₂+θ₃)` measured against the nearest multiple of π.
    pub fn angle_sum_residual(&self) -> f64 {
        dist_mod_pi(self.theta.iter().sum())
    }
}

pub fn mat_to_rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    [[m[(0, 0)], m[(0, 1)], m[(0, 2)]], [m[(1, 0)], m[(1, 1)], m[(1, 2)]], [m[(2, 0)], m[(2, 1)], m[(2, 2)]]]
}

fn max_abs(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Orthonormal basis of the span of `basis`, as close as possible to the standard frame.
fn canonical_basis(basis: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let k = basis.len();
    let proj = basis.iter().fold(Matrix3::zeros(), |acc, b| acc + b * b.transpose());
    let mut out: Vec<Vector3<f64>> = Vec::with_capacity(k);
    for axis in 0..3 {
        if out.len() == k {
            break;
        }
        let mut v = proj * Vector3::ith(axis, 1.0);
        for w in &out {
            v -= w * w.dot(&v);
        }
        if v.norm() > 1e-3 {
            out.push(v.normalize());
        }
    }
    out
}

fn sign_fix(v: Vector3<f64>) -> Vector3<f64> {
    match v.iter().find(|x| x.abs() > 1e-9) {
        Some(x) if *x < 0.0 => -v,
        _ => v,
    }
}

/// Simultaneous diagonalization of commuting symmetric `A`, `B` with `A² + B² = Id`.
///
/// Eigenvectors are ordered by ascending `cos 2θ`, then ascending `sin 2θ`, then
/// lexicographically (descending) against the input frame. Clusters where both
/// operators are scalar get the canonical basis closest to the input frame.
pub fn angle_functions(a: &Matrix3<f64>, b: &Matrix3<f64>) -> Result<AngleData> {
    if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
        return Err(Error::Domain("A and B must be finite".into()));
    }
    if max_abs(&(a - a.transpose())) > COMMUTATOR_TOL || max_abs(&(b - b.transpose())) > COMMUTATOR_TOL {
        return Err(Error::Domain("A and B must be symmetric".into()));
    }
    let comm = max_abs(&(a * b - b * a));
    if comm > COMMUTATOR_TOL {
        return Err(Error::Domain(format!("A and B do not commute (‖AB−BA‖ = {comm:e})")));
    }
    let a = (a + a.transpose()) * 0.5;
    let b = (b + b.transpose()) * 0.5;

    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    // Group A-eigenvalues into clusters, then diagonalize B inside each cluster.
    let mut vectors: Vec<Vector3<f64>> = Vec::with_capacity(3);
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < DEGENERACY_TOL {
            end += 1;
        }
        let basis: Vec<Vector3<f64>> =
            order[start..end].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        if basis.len() == 1 {
            vectors.push(basis[0]);
        } else {
            let basis = canonical_basis(&basis);
            let k = basis.len();
            let sub = DMatrix::from_fn(k, k, |i, j| basis[i].dot(&(b * basis[j])));
            let se = sub.clone().symmetric_eigen();
            let mut sub_order: Vec<usize> = (0..k).collect();
            sub_order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
            let mut s = 0;
            while s < k {
                let mut e = s + 1;
                while e < k && se.eigenvalues[sub_order[e]] - se.eigenvalues[sub_order[e - 1]] < DEGENERACY_TOL {
                    e += 1;
                }
                let group: Vec<Vector3<f64>> = sub_order[s..e]
                    .iter()
                    .map(|&c| {
                        let col = se.eigenvectors.column(c);
                        (0..k).fold(Vector3::zeros(), |acc, r| acc + basis[r] * col[r])
                    })
                    .collect();
                let mut group = if group.len() == 1 { group } else { canonical_basis(&group) };
                // Lexicographic tie-break: the vector leaning most on e₁ first.
                group.sort_by(|x, y| {
                    let (x, y) = (sign_fix(*x), sign_fix(*y));
                    y.iter()
                        .zip(x.iter())
                        .map(|(p, q)| p.total_cmp(q))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                vectors.extend(group);
                s = e;
            }
        }
        start = end;
    }

    let mut theta = [0.0; 3];
    let mut pairs = [(0.0, 0.0); 3];
    let mut frame = [[0.0; 3]; 3];
    for (i, v) in vectors.iter().enumerate() {
        let v = sign_fix(v.normalize());
        let c = v.dot(&(a * v));
        let s = v.dot(&(b * v));
        pairs[i] = (c, s);
        theta[i] = (s.atan2(c) / 2.0).rem_euclid(PI);
        if theta[i] >= PI {
            theta[i] = 0.0;
        }
        frame[i] = [v[0], v[1], v[2]];
    }
    let degenerate = (0..3).any(|i| {
        (i + 1..3).any(|j| {
            let (dc, ds) = (pairs[i].0 - pairs[j].0, pairs[i].1 - pairs[j].1);
            dc.hypot(ds) < DEGENERACY_TOL
        })
    });
    Ok(AngleData { theta, frame, degenerate })
}

/// Max over `i` and `j ≠ k` of
/// `|h_ij^k cos(θⱼ−θ_k) − (ε_ij^k/(2√3) − ω_ij^k) sin(θⱼ−θ_k)|`.
pub fn angle_connection_residual(theta: &[f64; 3], h: &[[[f64; 3]; 3]; 3], omega: &[[[f64; 3]; 3]; 3]) -> f64 {
    let mut worst: f64 = 0.0;
    let two_sqrt3 = 2.0 * 3f64.sqrt();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                if j == k {
                    continue;
                }
                let d = theta[j] - theta[k];
                let eps = f64::from(levi_civita(i, j, k));
                let r = h[i][j][k] * d.cos() - (eps / two_sqrt3 - omega[i][j][k]) * d.sin();
                worst = worst.max(r.abs());
            }
        }
    }
    worst
}
