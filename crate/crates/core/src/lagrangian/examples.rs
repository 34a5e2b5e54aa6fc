use std::path::Path;

use serde::Deserialize;

use super::immersion::{Immersion, Param};
use crate::error::{Error, Result};
use crate::nkgeom::PointS3S3;
use crate::quat::{exp_im, ImaginaryQuaternion, Quaternion};

pub const DEFAULT_DOMAIN: [[f64; 2]; 3] = [[-0.5, 0.5]; 3];

pub const FACTOR_LEFT: &str = "factor-left";
pub const FACTOR_RIGHT: &str = "factor-right";
pub const DIAGONAL: &str = "diagonal";
pub const TWISTED_CONTROL: &str = "twisted-control";

pub const EXAMPLE_NAMES: [&str; 4] = [FACTOR_LEFT, FACTOR_RIGHT, DIAGONAL, TWISTED_CONTROL];

fn im(u: &Param) -> ImaginaryQuaternion {
    ImaginaryQuaternion::from_array(*u)
}

/// Rotation of ℝ³ used by the twisted control, `exp` of the axis-angle vector (0.7, −0.4, 1.1).
pub fn twist_rotation() -> nalgebra::Rotation3<f64> {
    nalgebra::Rotation3::new(nalgebra::Vector3::new(0.7, -0.4, 1.1))
}

pub fn factor_left() -> Immersion {
    Immersion::new(FACTOR_LEFT, DEFAULT_DOMAIN, |u| PointS3S3::new(exp_im(im(u)), Quaternion::ONE))
}

pub fn factor_right() -> Immersion {
    Immersion::new(FACTOR_RIGHT, DEFAULT_DOMAIN, |u| PointS3S3::new(Quaternion::ONE, exp_im(im(u))))
}

pub fn diagonal() -> Immersion {
    Immersion::new(DIAGONAL, DEFAULT_DOMAIN, |u| {
        let p = exp_im(im(u));
        PointS3S3::new(p, p)
    })
}

/// `u ↦ (exp(u), exp(Ru))`, a graph that is not Lagrangian.
pub fn twisted_control() -> Immersion {
    let r = twist_rotation();
    Immersion::new(TWISTED_CONTROL, DEFAULT_DOMAIN, move |u| {
        let ru = r * nalgebra::Vector3::from(*u);
        PointS3S3::new(exp_im(im(u)), exp_im(ImaginaryQuaternion::new(ru[0], ru[1], ru[2])))
    })
}

/// The three Lagrangian candidates followed by the non-Lagrangian control.
pub fn builtin_examples() -> Vec<Immersion> {
    vec![factor_left(), factor_right(), diagonal(), twisted_control()]
}

/// The built-ins expected to be Lagrangian.
pub fn builtin_lagrangians() -> Vec<Immersion> {
    vec![factor_left(), factor_right(), diagonal()]
}

pub fn example_by_name(name: &str) -> Result<Immersion> {
    match name {
        FACTOR_LEFT => Ok(factor_left()),
        FACTOR_RIGHT => Ok(factor_right()),
        DIAGONAL => Ok(diagonal()),
        TWISTED_CONTROL => Ok(twisted_control()),
        other => Err(Error::UnknownExample(other.to_string())),
    }
}

/// Element `(a, b, c)` of SU(2)³ acting by `(p, q) ↦ (a·p·c̄, b·q·c̄)`.
///
/// This action preserves `g`, `J` and `P`, so it maps Lagrangians to Lagrangians.
#[derive(Clone, Copy, Debug, Deserialize)]
pub struct Isometry {
    #[serde(default = "one")]
    pub left: [f64; 4],
    #[serde(default = "one")]
    pub right: [f64; 4],
    #[serde(default = "one")]
    pub diagonal: [f64; 4],
}

fn one() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

/// Manifest naming a built-in example, optionally moved by an isometry and
/// reparametrized by a rotation of the parameter box.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub example: String,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub isometry: Option<Isometry>,
    /// Axis-angle vector of a rotation applied to the parameters before the map.
    #[serde(default)]
    pub domain_rotation: Option<[f64; 3]>,
    #[serde(default)]
    pub domain: Option<[[f64; 2]; 3]>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("immersion manifest: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<Immersion> {
        let inner = example_by_name(&self.example)?;
        let iso = match &self.isometry {
            Some(i) => Some([
                Quaternion::from_array(i.left).normalized()?,
                Quaternion::from_array(i.right).normalized()?,
                Quaternion::from_array(i.diagonal).normalized()?,
            ]),
            None => None,
        };
        let rot = self.domain_rotation.map(|v| nalgebra::Rotation3::new(nalgebra::Vector3::from(v)));
        let label = self.label.clone().unwrap_or_else(|| {
            let mut s = self.example.clone();
            if iso.is_some() {
                s.push_str("+isometry");
            }
            if rot.is_some() {
                s.push_str("+rotated");
            }
            s
        });
        let domain = match self.domain {
            Some(d) => {
                if d.iter().any(|[lo, hi]| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
                    return Err(Error::Parse("manifest domain must be finite [lo, hi] pairs".into()));
                }
                d
            }
            None => inner.domain(),
        };
        Ok(Immersion::new(label, domain, move |u| {
            let u = match rot {
                Some(r) => {
                    let v = r * nalgebra::Vector3::from(*u);
                    [v[0], v[1], v[2]]
                }
                None => *u,
            };
            let pt = inner.point(&u)?;
            match iso {
                Some([a, b, c]) => {
                    let cc = c.conj();
                    PointS3S3::new((a * pt.p() * cc).normalized()?, (b * pt.q() * cc).normalized()?)
                }
                None => Ok(pt),
            }
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_left_at_origin_is_identity_point() {
        let p = factor_left().point(&[0.0; 3]).unwrap();
        assert!(p.same_as(&PointS3S3::identity()));
    }

    #[test]
    fn unknown_names_rejected() {
        assert!(matches!(example_by_name("sphere"), Err(Error::UnknownExample(_))));
    }

    #[test]
    fn manifest_parsing() {
        let m = Manifest::from_json(
            r#"{"example": "diagonal", "isometry": {"left": [1, 1, 0, 0]}, "domain_rotation": [0.1, 0.2, 0.3]}"#,
        )
        .unwrap();
        let imm = m.build().unwrap();
        assert_eq!(imm.label(), "diagonal+isometry+rotated");
        assert!(imm.point(&[0.1, 0.0, -0.2]).is_ok());
        assert!(Manifest::from_json(r#"{"example": "diagonal", "bogus": 1}"#).is_err());
        assert!(Manifest::from_json("not json").is_err());
        let bad = Manifest::from_json(r#"{"example": "nope"}"#).unwrap();
        assert!(bad.build().is_err());
        let zero = Manifest::from_json(r#"{"example": "diagonal", "isometry": {"left": [0,0,0,0]}}"#).unwrap();
        assert!(zero.build().is_err());
    }

    #[test]
    fn grid_covers_box() {
        let g = diagonal().grid(5);
        assert_eq!(g.len(), 125);
        assert_eq!(g[0], [-0.5, -0.5, -0.5]);
        assert_eq!(g[124], [0.5, 0.5, 0.5]);
        assert_eq!(diagonal().grid(1), vec![[0.0, 0.0, 0.0]]);
    }
}
