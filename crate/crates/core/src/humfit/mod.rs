//! H-umbilical fitting of cubic forms, the totally umbilical lemma and the theorem harness.
mod checks;
mod fit;
mod tensor;

pub use checks::{theorem_harness, umbilical_asymmetry, umbilical_lemma_check, H_ACCURACY};
pub use fit::{
    best_fit, candidate_axes, fit, fit_along, grid_min_residual, HUmbilicalFit, DEFAULT_FIT_TOL, FIT_SEED, FIT_STARTS,
};
pub use tensor::{build_h_from_V, h_umbilical_pattern, CubicTensor, COMPONENT_KEYS};
