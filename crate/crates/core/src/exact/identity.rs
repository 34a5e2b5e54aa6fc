//! Randomized polynomial identity testing over ℚ(√3).
//!
//! Two polynomial maps of total degree `d` that differ agree on a uniformly
//! random point of `Sⁿ` with probability at most `d/|S|`; the sample space
//! here has ~2·10⁸ rationals per coordinate, far above the degrees used.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::qsqrt3::QSqrt3;
use super::rational::Rational;

pub const DEFAULT_TRIALS: usize = 100;
pub const SAMPLE_BOUND: i64 = 10_000;

#[derive(Clone, Debug)]
pub struct IdentityOutcome {
    pub agreed: bool,
    pub trials: usize,
    /// First point where the two maps differ.
    pub counterexample: Option<Vec<Rational>>,
}

/// Uniform rational with numerator in `[−10⁴, 10⁴]` and denominator in `[1, 10⁴]`.
pub fn sample_rational<R: Rng>(rng: &mut R) -> Rational {
    let n = rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND);
    let d = rng.gen_range(1..=SAMPLE_BOUND);
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn sample_point(seed: u64, trial: usize, n_vars: usize) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
    (0..n_vars).map(|_| sample_rational(&mut rng)).collect()
}

pub fn poly_identity_outcome<F, G>(f: F, g: G, n_vars: usize, trials: usize, seed: u64) -> IdentityOutcome
where
    F: Fn(&[Rational]) -> QSqrt3,
    G: Fn(&[Rational]) -> QSqrt3,
{
    let trials = trials.max(1);
    for t in 0..trials {
        let x = sample_point(seed, t, n_vars);
        if f(&x) != g(&x) {
            return IdentityOutcome { agreed: false, trials: t + 1, counterexample: Some(x) };
        }
    }
    IdentityOutcome { agreed: true, trials, counterexample: None }
}

/// True iff `f` and `g` agree at every sampled point (deterministic in `seed`).
pub fn poly_identity_check<F, G>(f: F, g: G, n_vars: usize, trials: usize, seed: u64) -> bool
where
    F: Fn(&[Rational]) -> QSqrt3,
    G: Fn(&[Rational]) -> QSqrt3,
{
    poly_identity_outcome(f, g, n_vars, trials, seed).agreed
}
