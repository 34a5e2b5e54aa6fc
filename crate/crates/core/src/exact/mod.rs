//! Exact arithmetic: rationals, the quadratic field ℚ(√3), rational points on
//! the unit circle, and evaluation-based polynomial identity testing.

mod circle;
mod field;
mod identity;
mod qsqrt3;
pub mod rational;

pub use circle::{angle_add, rat_circle_point, CirclePoint};
pub use field::{sq, Field};
pub use identity::{
    poly_identity_check, poly_identity_outcome, sample_point, sample_rational, IdentityOutcome, DEFAULT_TRIALS,
    SAMPLE_BOUND,
};
pub use qsqrt3::QSqrt3;
pub use rational::{int, rat, Rational};
