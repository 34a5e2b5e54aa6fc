//! The homogeneous nearly Kähler structure on S³×S³: points, tangent vectors,
//! the metric `g`, the almost complex structure `J`, the almost product
//! structure `P`, exponential charts, and `G = ∇̃J` via a finite-difference
//! Levi-Civita connection.

mod chart;
mod connection;
mod structure;

pub use chart::{coordinate_norm, dexp_left, Chart, MAX_CHART_RADIUS};
pub use connection::{covariant_derivative, g_tensor, Christoffel, LeviCivita};
pub use structure::{
    apply_j, apply_p, g6, j6, j_matrix, metric_g, metric_g_ambient, metric_matrix, p6, p_matrix, Mat6, PointS3S3,
    TangentVector, Vec6,
};

/// Levi-Civita symbol `ε_ijk` on zero-based indices.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i32 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::levi_civita;

    #[test]
    fn epsilon_values() {
        assert_eq!(levi_civita(0, 1, 2), 1);
        assert_eq!(levi_civita(1, 0, 2), -1);
        assert_eq!(levi_civita(0, 0, 2), 0);
        assert_eq!(levi_civita(2, 0, 1), 1);
    }
}
