use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::json;

use super::fit::fit;
use super::tensor::CubicTensor;
use crate::codazzi::rng_for;
use crate::error::{Error, Result};
use crate::lagrangian::{Analyzer, Immersion};
use crate::report::CheckRecord;

/// Accuracy of `h` delivered by the analyzer; the fit tolerance sits below it.
pub const H_ACCURACY: f64 = 1e-5;

/// Largest `|c_abc − c_σ(abc)|` of `c(X,Y,Z) = g(X,Y)⟨ξ,Z⟩`.
pub fn umbilical_asymmetry(xi: &[f64]) -> f64 {
    let n = xi.len();
    let c = |a: usize, b: usize, z: usize| if a == b { xi[z] } else { 0.0 };
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for z in 0..n {
                let v = c(a, b, z);
                for w in [c(a, z, b), c(b, a, z), c(b, z, a), c(z, a, b), c(z, b, a)] {
                    worst = worst.max((v - w).abs());
                }
            }
        }
    }
    worst
}

/// A symmetric totally umbilical cubic form must vanish: unit `ξ` in dimension `n`
/// always yields asymmetry at least `1/√n`, and `ξ = 0` yields none.
pub fn umbilical_lemma_check(n: usize, trials: usize, seed: u64) -> Result<CheckRecord> {
    if n < 2 {
        return Err(Error::Precondition(format!("dimension must be at least 2, got {n}")));
    }
    let trials = trials.max(1);
    let asym: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t);
            loop {
                let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    return umbilical_asymmetry(&g.iter().map(|x| x / norm).collect::<Vec<_>>());
                }
            }
        })
        .collect();
    let zero = umbilical_asymmetry(&vec![0.0; n]);
    let bound = 1.0 / (n as f64).sqrt();
    let min = asym.iter().copied().fold(f64::INFINITY, f64::min);
    let shortfall = (bound - min).max(0.0);
    Ok(CheckRecord::new(
        format!("humfit.umbilical_lemma.n{n}"),
        zero == 0.0 && min >= bound * (1.0 - 1e-12),
        shortfall.max(zero),
        0.0,
        trials,
        seed,
        json!({ "dimension": n, "min_asymmetry": min, "asymmetry_bound": bound, "zero_xi_asymmetry": zero }),
    ))
}

/// Runs the H-umbilical fit on `h` at every grid point. A successful fit must
/// come with `‖h‖`, `λ`, `μ` all within [`H_ACCURACY`] of zero; anything else
/// is reported as a falsification candidate.
pub fn theorem_harness(analyzer: &Analyzer, imm: &Immersion, grid: usize, tol: f64, seed: u64) -> Result<CheckRecord> {
    let points = imm.grid(grid);
    let rows: Vec<Result<(f64, Option<super::HUmbilicalFit>)>> = points
        .par_iter()
        .map(|u| {
            let l = analyzer.is_lagrangian(imm, u, analyzer.lagrangian_tol)?;
            if !l.is_lagrangian {
                return Err(Error::Domain(format!(
                    "{} is not Lagrangian at {u:?} (residual {:.3e})",
                    imm.label(),
                    l.residual
                )));
            }
            let sff = analyzer.second_fundamental_form(imm, u)?;
            let h = CubicTensor::from_dense(&sff.cubic);
            Ok((h.norm(), fit(&h, tol)))
        })
        .collect();
    let mut fitted = 0usize;
    let mut max_norm: f64 = 0.0;
    let mut max_coeff: f64 = 0.0;
    let mut candidates = Vec::new();
    for (u, r) in points.iter().zip(rows) {
        let (norm, f) = r?;
        max_norm = max_norm.max(norm);
        if let Some(f) = f {
            fitted += 1;
            let coeff = f.lambda.abs().max(f.mu.abs());
            max_coeff = max_coeff.max(coeff);
            if norm > H_ACCURACY || coeff > H_ACCURACY {
                candidates.push(json!({ "u": u, "h_norm": norm, "fit": f }));
            }
        }
    }
    let residual = if fitted > 0 { max_norm.max(max_coeff) } else { 0.0 };
    Ok(CheckRecord::new(
        format!("humfit.theorem.{}", imm.label()),
        candidates.is_empty(),
        residual,
        H_ACCURACY,
        points.len(),
        seed,
        json!({
            "fit_tolerance": tol,
            "fitted_points": fitted,
            "rejected_points": points.len() - fitted,
            "max_h_norm": max_norm,
            "max_fitted_coefficient": max_coeff,
            "falsification_candidates": candidates,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::humfit::DEFAULT_FIT_TOL;
    use crate::lagrangian::{diagonal, factor_left, twisted_control};

    #[test]
    fn planar_example() {
        let c = |xi: &[f64; 2], a: usize, b: usize, z: usize| if a == b { xi[z] } else { 0.0 };
        let xi = [1.0, 0.0];
        assert_eq!(c(&xi, 1, 1, 0), 1.0);
        assert_eq!(c(&xi, 1, 0, 1), 0.0);
        assert_eq!(umbilical_asymmetry(&xi), 1.0);
        assert_eq!(umbilical_asymmetry(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn lemma_passes_in_low_dimensions() {
        for n in [2, 3, 4] {
            let r = umbilical_lemma_check(n, 100, 5).unwrap();
            assert!(r.passed(), "{}", r.details);
        }
        assert!(umbilical_lemma_check(1, 3, 5).is_err());
    }

    #[test]
    fn harness_on_examples() {
        let an = Analyzer::default();
        for imm in [diagonal(), factor_left()] {
            let r = theorem_harness(&an, &imm, 3, DEFAULT_FIT_TOL, 0).unwrap();
            assert!(r.passed(), "{}", r.details);
            assert_eq!(r.details["rejected_points"], 0);
        }
        assert!(matches!(theorem_harness(&an, &twisted_control(), 2, DEFAULT_FIT_TOL, 0), Err(Error::Domain(_))));
    }
}
