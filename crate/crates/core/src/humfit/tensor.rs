use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codazzi::hijk_from_v;
use crate::error::{Error, Result};
use crate::lagrangian::Cubic;

/// Canonical keys of the ten independent components, in storage order.
pub const COMPONENT_KEYS: [&str; 10] = ["111", "112", "113", "122", "123", "133", "222", "223", "233", "333"];

/// Fully symmetric cubic form on a 3-dimensional inner product space.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicTensor {
    c: [f64; 10],
}

fn slot(a: usize, b: usize, c: usize) -> usize {
    let mut idx = [a, b, c];
    idx.sort_unstable();
    let key: String = idx.iter().map(|i| char::from(b'1' + *i as u8)).collect();
    COMPONENT_KEYS.iter().position(|k| *k == key).expect("index below 3")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    n: usize,
    components: BTreeMap<String, f64>,
}

impl CubicTensor {
    pub fn zero() -> Self {
        Self { c: [0.0; 10] }
    }

    /// Components in the order of [`COMPONENT_KEYS`].
    pub fn from_components(c: [f64; 10]) -> Self {
        Self { c }
    }

    /// Symmetrizes a dense array.
    pub fn from_dense(d: &Cubic) -> Self {
        let mut c = [0.0; 10];
        let mut count = [0u32; 10];
        for a in 0..3 {
            for b in 0..3 {
                for e in 0..3 {
                    let s = slot(a, b, e);
                    c[s] += d[a][b][e];
                    count[s] += 1;
                }
            }
        }
        for (x, n) in c.iter_mut().zip(count) {
            *x /= f64::from(n);
        }
        Self { c }
    }

    pub fn components(&self) -> &[f64; 10] {
        &self.c
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.c[slot(a, b, c)]
    }

    pub fn dense(&self) -> Cubic {
        std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|c| self.get(a, b, c))))
    }

    /// Frobenius norm over all 27 entries.
    pub fn norm(&self) -> f64 {
        let d = self.dense();
        d.iter().flatten().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { c: self.c.map(|x| x * s) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { c: std::array::from_fn(|k| self.c[k] - o.c[k]) }
    }

    /// `Σ_a c_aab` for each `b`.
    pub fn traces(&self) -> [f64; 3] {
        std::array::from_fn(|b| (0..3).map(|a| self.get(a, a, b)).sum())
    }

    /// `c(x, y, z)`.
    pub fn eval(&self, x: &[f64; 3], y: &[f64; 3], z: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    s += self.get(a, b, c) * x[a] * y[b] * z[c];
                }
            }
        }
        s
    }

    /// The covector `c(u, u, ·)`.
    pub fn contract2(&self, u: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|c| {
            let mut s = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    s += self.get(a, b, c) * u[a] * u[b];
                }
            }
            s
        })
    }

    /// The bilinear form `c(u, ·, ·)`.
    pub fn contract1(&self, u: &[f64; 3]) -> [[f64; 3]; 3] {
        std::array::from_fn(|b| std::array::from_fn(|c| (0..3).map(|a| self.get(a, b, c) * u[a]).sum()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let w: Wire = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if w.n != 3 {
            return Err(Error::Parse(format!("only n = 3 tensors are supported, got n = {}", w.n)));
        }
        if let Some(k) = w.components.keys().find(|k| !COMPONENT_KEYS.contains(&k.as_str())) {
            return Err(Error::Parse(format!("unexpected component key {k:?}; keys use ascending indices")));
        }
        let mut c = [0.0; 10];
        for (i, k) in COMPONENT_KEYS.iter().enumerate() {
            c[i] = *w.components.get(*k).ok_or_else(|| Error::Parse(format!("missing component key {k:?}")))?;
            if !c[i].is_finite() {
                return Err(Error::Parse(format!("component {k:?} is not finite")));
            }
        }
        Ok(Self { c })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl Serialize for CubicTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let components = COMPONENT_KEYS.iter().zip(self.c).map(|(k, x)| (k.to_string(), x)).collect();
        Wire { n: 3, components }.serialize(s)
    }
}

/// The minimal H-umbilical cubic form determined by `V`:
/// `U₁ = V/|V|`, `μ = |V|³`, `λ = −2μ`.
#[allow(non_snake_case)]
pub fn build_h_from_V(v: &[f64; 3]) -> CubicTensor {
    CubicTensor::from_dense(&hijk_from_v(v))
}

/// `c(X,Y,Z) = (λ − 3μ)x₁y₁z₁ + μ(x₁⟨Y,Z⟩ + y₁⟨X,Z⟩ + z₁⟨X,Y⟩)` with `x₁ = ⟨X,U₁⟩`.
pub fn h_umbilical_pattern(u1: &[f64; 3], lambda: f64, mu: f64) -> CubicTensor {
    let d: Cubic = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
                (lambda - 3.0 * mu) * u1[a] * u1[b] * u1[c]
                    + mu * (u1[a] * delta(b, c) + u1[b] * delta(a, c) + u1[c] * delta(a, b))
            })
        })
    });
    CubicTensor::from_dense(&d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn e1_components() {
        let h = build_h_from_V(&[1.0, 0.0, 0.0]);
        assert_eq!(h.get(0, 0, 0), -2.0);
        assert_eq!(h.get(0, 1, 1), 1.0);
        assert_eq!(h.get(0, 2, 2), 1.0);
        for k in ["112", "113", "123", "222", "223", "233", "333"] {
            let i = COMPONENT_KEYS.iter().position(|x| *x == k).unwrap();
            assert_eq!(h.components()[i], 0.0, "{k}");
        }
        assert_eq!(build_h_from_V(&[2.0, 0.0, 0.0]).get(0, 1, 1), 8.0);
        assert_eq!(build_h_from_V(&[0.0; 3]), CubicTensor::zero());
    }

    #[test]
    fn matches_contraction_formula() {
        let v = [0.3, -1.2, 0.7];
        let h = build_h_from_V(&v);
        let n2 = dot(&v, &v);
        let basis = |i: usize| std::array::from_fn::<f64, 3, _>(|k| if k == i { 1.0 } else { 0.0 });
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let (x, y, z) = (basis(a), basis(b), basis(c));
                    let want = n2 * (dot(&y, &v) * dot(&x, &z) + dot(&x, &v) * dot(&y, &z) + dot(&x, &y) * dot(&z, &v))
                        - 5.0 * dot(&x, &v) * dot(&y, &v) * dot(&z, &v);
                    assert!((h.get(a, b, c) - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn pattern_agrees_with_builder() {
        let v = [0.5, 0.2, -0.9];
        let r = dot(&v, &v).sqrt();
        let u = v.map(|x| x / r);
        let mu = r.powi(3);
        let p = h_umbilical_pattern(&u, -2.0 * mu, mu);
        assert!(p.sub(&build_h_from_V(&v)).norm() < 1e-13);
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let h = build_h_from_V(&[1.0, 2.0, -0.5]);
        assert_eq!(CubicTensor::from_json(&h.to_json()).unwrap(), h);
        let mut v: serde_json::Value = serde_json::from_str(&h.to_json()).unwrap();
        v["components"].as_object_mut().unwrap().remove("223");
        let err = CubicTensor::from_json(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("\"223\""), "{err}");
        v["components"]["223"] = 0.0.into();
        v["components"]["321"] = 0.0.into();
        assert!(CubicTensor::from_json(&v.to_string()).unwrap_err().to_string().contains("321"));
        assert!(CubicTensor::from_json("{\"n\":4,\"components\":{}}").is_err());
    }
}
