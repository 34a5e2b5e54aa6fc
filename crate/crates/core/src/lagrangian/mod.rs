//! Finite-difference analysis of parametrized immersions into S³×S³.

mod analysis;
mod angles;
mod examples;
mod immersion;
#[cfg(test)]
mod tests;

pub use analysis::{
    angle_sum_residual, angles_of, cubic_max, symmetry_residual, AbOperators, AdaptedFrameData, Analyzer, Cubic,
    LagrangianCheck, SecondFundamentalForm,
};
pub use angles::{angle_connection_residual, angle_functions, dist_mod_pi, AngleData, COMMUTATOR_TOL, DEGENERACY_TOL};
pub use examples::{
    builtin_examples, builtin_lagrangians, diagonal, example_by_name, factor_left, factor_right, twist_rotation,
    twisted_control, Isometry, Manifest, DEFAULT_DOMAIN, EXAMPLE_NAMES,
};
pub use immersion::{Immersion, Param, PUSHFORWARD_STEP, RANK_TOL};
