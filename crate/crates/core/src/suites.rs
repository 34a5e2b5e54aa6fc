//! Verification suites shared by the command line and the C interface.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::codazzi::{
    angle_connection_check, case1_check, case2_check, case3_check, det_factorization_check, rng_for, system1_check,
};
use crate::error::Result;
use crate::humfit::{best_fit, fit, theorem_harness, umbilical_lemma_check, CubicTensor, DEFAULT_FIT_TOL};
use crate::lagrangian::{Analyzer, Immersion, Param};
use crate::nkgeom::{apply_j, apply_p, g_tensor, metric_g, metric_g_ambient, PointS3S3, TangentVector, Vec6};
use crate::quat::{exp_im, ImaginaryQuaternion};
use crate::report::{CheckRecord, VerificationReport};

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_G_SAMPLES: usize = 200;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_GRID: usize = 5;

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Replaces every numeric tolerance when set.
    pub tol: Option<f64>,
    pub timings: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, tol: None, timings: false }
    }
}

impl SuiteOptions {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn timed(&self, f: impl FnOnce() -> CheckRecord) -> CheckRecord {
        let start = Instant::now();
        let r = f();
        let ms = self.timings.then(|| start.elapsed().as_millis() as u64);
        r.with_elapsed(ms)
    }

    fn timed_many(&self, f: impl FnOnce() -> Vec<CheckRecord>) -> Vec<CheckRecord> {
        let start = Instant::now();
        let rs = f();
        let ms = self.timings.then(|| start.elapsed().as_millis() as u64);
        rs.into_iter().map(|r| r.with_elapsed(ms)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProofMode {
    Exact,
    Numeric,
    All,
}

impl ProofMode {
    fn exact(self) -> bool {
        self != ProofMode::Numeric
    }

    fn numeric(self) -> bool {
        self != ProofMode::Exact
    }
}

// ---------------------------------------------------------------------------

fn random_point<R: Rng>(rng: &mut R) -> PointS3S3 {
    let mut im =
        || ImaginaryQuaternion::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    PointS3S3::new(exp_im(im()), exp_im(im())).expect("exp of an imaginary quaternion is unit")
}

fn random_vector<R: Rng>(rng: &mut R, base: PointS3S3) -> TangentVector {
    TangentVector::from_coords(base, &Vec6::from_fn(|_, _| rng.gen_range(-1.0..1.0)))
}

type AlgebraCheck = (&'static str, f64, fn(&AlgebraSample) -> f64);
type ExactCheck = (&'static str, fn(u64, usize) -> CheckRecord);

struct AlgebraSample {
    j_squared: f64,
    j_isometry: f64,
    p_squared: f64,
    jp_anticommute: f64,
    metric_lines: f64,
}

fn algebra_sample(seed: u64, i: usize) -> Result<AlgebraSample> {
    let mut rng = rng_for(seed, i);
    let b = random_point(&mut rng);
    let (x, y) = (random_vector(&mut rng, b), random_vector(&mut rng, b));
    let xc = x.coords();
    let jjx = apply_j(&apply_j(&x)).coords();
    let ppx = apply_p(&apply_p(&x)).coords();
    let jp = apply_j(&apply_p(&x)).coords() + apply_p(&apply_j(&x)).coords();
    Ok(AlgebraSample {
        j_squared: (jjx + xc).amax(),
        j_isometry: (metric_g(&apply_j(&x), &apply_j(&y))? - metric_g(&x, &y)?).abs(),
        p_squared: (ppx - xc).amax(),
        jp_anticommute: jp.amax(),
        metric_lines: (metric_g(&x, &y)? - metric_g_ambient(&x, &y)?).abs(),
    })
}

fn g_sample(seed: u64, i: usize) -> Result<(f64, f64)> {
    let mut rng = rng_for(seed, i);
    let b = random_point(&mut rng);
    let (x, y) = (random_vector(&mut rng, b), random_vector(&mut rng, b));
    let gxx = g_tensor(&x, &x)?.coords().amax();
    let skew = (g_tensor(&x, &y)?.coords() + g_tensor(&y, &x)?.coords()).amax();
    Ok((gxx, skew))
}

fn max_of(xs: impl Iterator<Item = f64>) -> f64 {
    // NaN propagates so that the record fails.
    xs.fold(0.0, |m: f64, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

fn error_record(id: &str, tol: f64, n: usize, seed: u64, e: &crate::Error) -> CheckRecord {
    CheckRecord::new(id, false, 0.0, tol, n, seed, json!({ "error": e.to_string() }))
}

/// Algebraic identities of `g`, `J`, `P` over `samples` points, and `G = ∇̃J`
/// skewness over `g_samples` points.
pub fn structure_suite(samples: usize, g_samples: usize, opts: &SuiteOptions) -> VerificationReport {
    let seed = opts.seed;
    let samples = samples.max(1);
    let mut checks = Vec::new();
    let algebra: Vec<Result<AlgebraSample>> = (0..samples).into_par_iter().map(|i| algebra_sample(seed, i)).collect();
    let algebra: Result<Vec<AlgebraSample>> = algebra.into_iter().collect();
    let specs: [AlgebraCheck; 5] = [
        ("structure.j_squared", 1e-12, |s| s.j_squared),
        ("structure.j_isometry", 1e-12, |s| s.j_isometry),
        ("structure.p_squared", 0.0, |s| s.p_squared),
        ("structure.jp_anticommute", 1e-13, |s| s.jp_anticommute),
        ("structure.metric_forms_agree", 1e-12, |s| s.metric_lines),
    ];
    for (id, tol, get) in specs {
        let tol = opts.tol(tol);
        checks.push(match &algebra {
            Ok(a) => CheckRecord::threshold(id, max_of(a.iter().map(get)), tol, samples, seed, json!({})),
            Err(e) => error_record(id, tol, samples, seed, e),
        });
    }

    let g_samples = g_samples.max(1);
    let g_seed = seed.wrapping_add(samples as u64);
    checks.extend(opts.timed_many(|| {
        let res: Result<Vec<(f64, f64)>> =
            (0..g_samples).into_par_iter().map(|i| g_sample(g_seed, i)).collect::<Vec<_>>().into_iter().collect();
        let tol = opts.tol(1e-5);
        let details = json!({ "sample_seed": g_seed, "connection_step": crate::nkgeom::LeviCivita::default().step });
        match res {
            Ok(v) => vec![
                CheckRecord::threshold(
                    "structure.g_diagonal",
                    max_of(v.iter().map(|s| s.0)),
                    tol,
                    g_samples,
                    seed,
                    details.clone(),
                ),
                CheckRecord::threshold(
                    "structure.g_skew",
                    max_of(v.iter().map(|s| s.1)),
                    tol,
                    g_samples,
                    seed,
                    details,
                ),
            ],
            Err(e) => vec![
                error_record("structure.g_diagonal", tol, g_samples, seed, &e),
                error_record("structure.g_skew", tol, g_samples, seed, &e),
            ],
        }
    }));
    VerificationReport::new("structure", checks)
}

// ---------------------------------------------------------------------------

struct PointResult {
    u: Param,
    lagrangian: f64,
    mean_curvature: f64,
    symmetry: f64,
    angle_sum: f64,
    frame_formula: f64,
    codazzi: f64,
}

fn analyze_point(an: &Analyzer, imm: &Immersion, u: &Param) -> Result<PointResult> {
    let sff = an.second_fundamental_form(imm, u)?;
    let frame = an.frame_components(imm, u)?;
    Ok(PointResult {
        u: *u,
        lagrangian: an.is_lagrangian(imm, u, an.lagrangian_tol)?.residual,
        mean_curvature: sff.mean_curvature_norm,
        symmetry: sff.symmetry_residual,
        angle_sum: frame.angle_sum_residual,
        frame_formula: frame.orientation_residual,
        codazzi: an.codazzi_residual(imm, u)?,
    })
}

/// Per-immersion checks on an `n³` parameter grid. A failed Lagrangian
/// precondition marks every downstream check as skipped.
pub fn lagrangian_checks(an: &Analyzer, imm: &Immersion, grid: usize, opts: &SuiteOptions) -> Vec<CheckRecord> {
    let seed = opts.seed;
    let label = imm.label().to_string();
    let id = |s: &str| format!("lagrangian.{label}.{s}");
    let points = imm.grid(grid.max(1));
    let n = points.len();
    let downstream: [(&str, f64); 5] = [
        ("minimality", 1e-5),
        ("cubic_symmetry", 1e-5),
        ("angle_sum", 1e-5),
        ("frame_formula", 1e-4),
        ("codazzi", 1e-4),
    ];
    let lag_tol = opts.tol(1e-9);

    let pre: Vec<Result<f64>> =
        points.par_iter().map(|u| an.is_lagrangian(imm, u, lag_tol).map(|c| c.residual)).collect();
    let mut lag_max: f64 = 0.0;
    let mut worst_point = None;
    for (u, r) in points.iter().zip(&pre) {
        match r {
            Ok(r) => {
                if *r > lag_max || r.is_nan() {
                    lag_max = *r;
                    worst_point = Some(*u);
                }
            }
            Err(e) => {
                let mut out = vec![error_record(&id("is_lagrangian"), lag_tol, n, seed, e)];
                out.extend(
                    downstream.iter().map(|(s, t)| CheckRecord::skip(id(s), opts.tol(*t), seed, "analysis error")),
                );
                return out;
            }
        }
    }
    let lag = CheckRecord::threshold(
        id("is_lagrangian"),
        lag_max,
        lag_tol,
        n,
        seed,
        json!({ "grid": grid, "worst_point": worst_point }),
    );
    if !lag.passed() {
        let mut out = vec![lag];
        out.extend(
            downstream.iter().map(|(s, t)| CheckRecord::skip(id(s), opts.tol(*t), seed, "immersion is not Lagrangian")),
        );
        return out;
    }

    let results: Vec<Result<PointResult>> = points.par_iter().map(|u| analyze_point(an, imm, u)).collect();
    let results: Result<Vec<PointResult>> = results.into_iter().collect();
    let mut out = vec![lag];
    match results {
        Err(e) => out.extend(downstream.iter().map(|(s, t)| error_record(&id(s), opts.tol(*t), n, seed, &e))),
        Ok(rs) => {
            let getters: [fn(&PointResult) -> f64; 5] =
                [|p| p.mean_curvature, |p| p.symmetry, |p| p.angle_sum, |p| p.frame_formula, |p| p.codazzi];
            for ((name, tol), get) in downstream.iter().zip(getters) {
                let worst = rs.iter().max_by(|a, b| get(a).total_cmp(&get(b))).expect("non-empty grid");
                let per_point: Vec<_> = rs.iter().map(|p| json!([p.u, get(p)])).collect();
                out.push(CheckRecord::threshold(
                    id(name),
                    max_of(rs.iter().map(get)),
                    opts.tol(*tol),
                    n,
                    seed,
                    json!({ "grid": grid, "worst_point": worst.u, "points": per_point }),
                ));
            }
            debug_assert!(rs.iter().all(|p| p.lagrangian <= lag_tol));
        }
    }
    out
}

pub fn lagrangian_suite(imms: &[Immersion], grid: usize, opts: &SuiteOptions) -> VerificationReport {
    let an = Analyzer::default();
    let mut checks = Vec::new();
    for imm in imms {
        let recs = opts.timed_many(|| lagrangian_checks(&an, imm, grid, opts));
        let lagrangian = recs.first().is_some_and(CheckRecord::passed);
        checks.extend(recs);
        let id = format!("humfit.theorem.{}", imm.label());
        checks.push(if lagrangian {
            opts.timed(|| match theorem_harness(&an, imm, grid, opts.tol(DEFAULT_FIT_TOL), opts.seed) {
                Ok(r) => r,
                Err(e) => error_record(&id, crate::humfit::H_ACCURACY, 0, opts.seed, &e),
            })
        } else {
            CheckRecord::skip(id, crate::humfit::H_ACCURACY, opts.seed, "immersion is not Lagrangian")
        });
    }
    VerificationReport::new("lagrangian", checks)
}

// ---------------------------------------------------------------------------

pub fn proof_suite(trials: usize, mode: ProofMode, opts: &SuiteOptions) -> VerificationReport {
    let seed = opts.seed;
    let mut checks = Vec::new();
    let exact: [ExactCheck; 5] = [
        ("codazzi.angle_connection", angle_connection_check),
        ("codazzi.system1", system1_check),
        ("codazzi.case1", case1_check),
        ("codazzi.case2", case2_check),
        ("codazzi.det_factorization", det_factorization_check),
    ];
    for (id, f) in exact {
        checks.push(if mode.exact() {
            opts.timed(|| f(seed, trials))
        } else {
            CheckRecord::skip(id, 0.0, seed, "exact checks excluded by mode")
        });
    }
    let tol3 = opts.tol(1e-8);
    checks.push(if mode.numeric() {
        opts.timed(|| case3_check(seed, trials, tol3))
    } else {
        CheckRecord::skip("codazzi.case3", tol3, seed, "numeric checks excluded by mode")
    });
    if mode.numeric() {
        for n in [2, 3, 4] {
            checks.push(opts.timed(|| umbilical_lemma_check(n, trials, seed).expect("dimension at least 2")));
        }
    } else {
        for n in [2, 3, 4] {
            checks.push(CheckRecord::skip(
                format!("humfit.umbilical_lemma.n{n}"),
                0.0,
                seed,
                "numeric checks excluded by mode",
            ));
        }
    }
    VerificationReport::new("proof", checks)
}

// ---------------------------------------------------------------------------

/// Fit of a single tensor. A rejection is a valid outcome and does not fail the record.
pub fn fit_report(h: &CubicTensor, opts: &SuiteOptions) -> VerificationReport {
    let tol = opts.tol(DEFAULT_FIT_TOL);
    let rec = opts.timed(|| {
        let found = fit(h, tol);
        let (accepted, best) = match found {
            Some(f) => (true, f),
            None => (false, best_fit(h)),
        };
        CheckRecord::new(
            "humfit.fit",
            true,
            best.residual,
            tol,
            1,
            opts.seed,
            json!({ "accepted": accepted, "h_norm": h.norm(), "fit": best }),
        )
    });
    VerificationReport::new("fit", vec![rec])
}
