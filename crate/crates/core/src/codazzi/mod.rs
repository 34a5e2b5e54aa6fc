//! Exact frame-level Codazzi engine over ℚ(√3), with a floating-point route
//! for the transcendental case.

mod checks;
mod engine;
mod state;

pub use checks::{
    angle_connection_check, angle_connection_holds, case1_check, case1_constraint, case2_check, case2_displays,
    case3_branch_constraint, case3_check, case3_closed_forms, case3_sample, case3_theta2, compatibility_forms,
    det_factorization_check, determinant_product, first_unknowns, quartic_brackets, rng_for, second_unknowns,
    system1_check, system1_differences, system2_coefficients, vanishing_columns, Case3Sample, FIRST_TRIPLES,
    SECOND_TRIPLES,
};
pub use engine::{
    codazzi_components, eliminate, hijk_from_v, omega_from_state, solve_triple_system, CodazziSystem, ComponentIndex,
    Tensor3, TripleSolution,
};
pub use state::{d_index, numeric_state, Affine, ExactState, FrameState, N_D};
