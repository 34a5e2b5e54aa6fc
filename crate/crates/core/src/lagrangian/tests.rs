use super::*;
use crate::error::Error;
use crate::nkgeom::PointS3S3;
use crate::quat::{exp_im, ImaginaryQuaternion, Quaternion};

/// `u ↦ (p i p̄, p j p̄)` with `p = exp(u)`: minimal, Lagrangian, not totally geodesic.
fn conjugation_orbit() -> Immersion {
    Immersion::new("conjugation-orbit", DEFAULT_DOMAIN, |u| {
        let p = exp_im(ImaginaryQuaternion::from_array(*u));
        PointS3S3::new(p * Quaternion::I * p.conj(), p * Quaternion::J * p.conj())
    })
}

const U: Param = [0.1, -0.2, 0.3];

#[test]
fn builtins_are_lagrangian_on_a_coarse_grid() {
    let an = Analyzer::default();
    for imm in builtin_lagrangians() {
        for u in imm.grid(3) {
            let r = an.is_lagrangian(&imm, &u, 1e-9).unwrap();
            assert!(r.is_lagrangian, "{} at {u:?}: {:e}", imm.label(), r.residual);
        }
    }
}

#[test]
fn twisted_control_is_rejected() {
    let an = Analyzer::default();
    let imm = twisted_control();
    let r = an.is_lagrangian(&imm, &U, 1e-9).unwrap();
    assert!(r.residual > 0.1);
    assert!(matches!(an.second_fundamental_form(&imm, &U), Err(Error::Precondition(_))));
    assert!(matches!(an.codazzi_residual(&imm, &U), Err(Error::Precondition(_))));
    assert!(matches!(an.frame_components(&imm, &U), Err(Error::Precondition(_))));
}

#[test]
fn diagonal_has_identity_a_and_zero_b() {
    let ab = Analyzer::default().ab_operators(&diagonal(), &U).unwrap();
    assert!((ab.a_matrix() - nalgebra::Matrix3::identity()).amax() < 1e-8);
    assert!(ab.b_matrix().amax() < 1e-8);
    assert!(ab.decomposition_residual < 1e-8);
}

#[test]
fn diagonal_frame_is_degenerate_and_geodesic() {
    let fc = Analyzer::default().frame_components(&diagonal(), &U).unwrap();
    assert!(fc.degenerate);
    assert!(fc.angle_connection_residual.is_none() && fc.angle_derivative_residual.is_none());
    assert!(cubic_max(&fc.h) < 1e-5);
    assert!(fc.orientation_residual < 1e-4);
}

#[test]
fn factor_left_angles() {
    let fc = Analyzer::default().frame_components(&factor_left(), &U).unwrap();
    for t in fc.theta {
        assert!(dist_mod_pi(t - 2.0 * std::f64::consts::FRAC_PI_3) < 1e-8);
    }
}

#[test]
fn non_degenerate_fixture_satisfies_frame_relations() {
    let an = Analyzer::default();
    let imm = conjugation_orbit();
    let sff = an.second_fundamental_form(&imm, &U).unwrap();
    assert!(sff.norm > 0.1);
    assert!(sff.mean_curvature_norm < 1e-5);
    assert!(sff.symmetry_residual < 1e-5);
    let fc = an.frame_components(&imm, &U).unwrap();
    assert!(!fc.degenerate);
    assert!(fc.angle_sum_residual < 1e-5);
    assert!(fc.orientation_residual < 1e-4);
    assert!(fc.orthonormality_residual < 1e-10);
    assert!(fc.angle_connection_residual.unwrap() < 1e-5);
    assert!(fc.angle_derivative_residual.unwrap() < 1e-5);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                assert!((fc.omega[i][j][k] + fc.omega[i][k][j]).abs() < 1e-8);
            }
        }
    }
    assert!(an.codazzi_residual(&imm, &U).unwrap() < 1e-4);
}

#[test]
fn isometric_copy_keeps_invariants() {
    let m = Manifest::from_json(
        r#"{"example": "factor-right",
            "isometry": {"left": [0.3, 0.1, -0.7, 0.2], "right": [0.5, 0.5, 0.1, -0.4], "diagonal": [0.9, -0.2, 0.3, 0.1]},
            "domain_rotation": [0.4, 0.0, -0.3]}"#,
    )
    .unwrap();
    let imm = m.build().unwrap();
    let an = Analyzer::default();
    assert!(an.is_lagrangian(&imm, &U, 1e-9).unwrap().is_lagrangian);
    let fc = an.frame_components(&imm, &U).unwrap();
    assert!(fc.orientation_residual < 1e-4);
    assert!(cubic_max(&fc.h) < 1e-5);
    assert!(fc.angle_sum_residual < 1e-5);
    assert!(an.codazzi_residual(&imm, &U).unwrap() < 1e-4);
}

#[test]
fn rank_deficient_and_out_of_domain_inputs() {
    let an = Analyzer::default();
    let flat = Immersion::new("flat", DEFAULT_DOMAIN, |u| {
        PointS3S3::new(exp_im(ImaginaryQuaternion::new(u[0], u[1], 0.0)), Quaternion::ONE)
    });
    assert!(matches!(an.is_lagrangian(&flat, &U, 1e-9), Err(Error::Domain(_))));
    assert!(matches!(an.is_lagrangian(&diagonal(), &[2.0, 0.0, 0.0], 1e-9), Err(Error::Domain(_))));
}

#[test]
fn analytic_jacobian_matches_finite_differences() {
    let with = factor_left().with_jacobian(|u| {
        let p = exp_im(ImaginaryQuaternion::from_array(*u));
        let base = PointS3S3::new(p, Quaternion::ONE)?;
        let xi = ImaginaryQuaternion::from_array(*u);
        Ok(std::array::from_fn(|i| {
            crate::nkgeom::TangentVector::new(
                base,
                crate::nkgeom::dexp_left(xi, ImaginaryQuaternion::basis(i)),
                ImaginaryQuaternion::ZERO,
            )
        }))
    });
    let a = with.pushforward(&U).unwrap();
    let b = factor_left().pushforward(&U).unwrap();
    for i in 0..3 {
        assert!((a[i] - b[i]).amax() < 1e-9);
    }
}

#[test]
fn angle_connection_on_synthetic_data() {
    // ω chosen so every relation holds exactly for h = 0.
    let theta = [0.2, 0.9, 2.1];
    let h = [[[0.0; 3]; 3]; 3];
    let mut omega = [[[0.0; 3]; 3]; 3];
    for (i, oi) in omega.iter_mut().enumerate() {
        for (j, oij) in oi.iter_mut().enumerate() {
            for (k, o) in oij.iter_mut().enumerate() {
                if j != k {
                    *o = f64::from(crate::nkgeom::levi_civita(i, j, k)) / (2.0 * 3f64.sqrt());
                }
            }
        }
    }
    assert!(angle_connection_residual(&theta, &h, &omega) < 1e-15);
    omega[0][1][2] += 0.1;
    assert!(angle_connection_residual(&theta, &h, &omega) > 1e-3);
}
