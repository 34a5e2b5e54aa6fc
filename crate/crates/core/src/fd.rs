//! Central finite differences with one Richardson extrapolation level.

use nalgebra::SMatrix;

use crate::error::{Error, Result};

/// Smallest step accepted before the difference quotient is dominated by rounding.
pub const MIN_STEP: f64 = 1e-10;

pub fn check_step(h: f64) -> Result<()> {
    if !(h.is_finite() && h >= MIN_STEP) {
        return Err(Error::Numeric(format!("finite-difference step {h:e} underflows")));
    }
    Ok(())
}

/// `d/dt f(t)` at `t = 0` from steps `h` and `h/2`, error O(h⁴).
pub fn richardson<const R: usize, const C: usize>(f: impl Fn(f64) -> SMatrix<f64, R, C>, h: f64) -> SMatrix<f64, R, C> {
    let d = |s: f64| (f(s) - f(-s)) / (2.0 * s);
    (d(h / 2.0) * 4.0 - d(h)) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector2;

    #[test]
    fn derivatives_of_smooth_functions() {
        let d = richardson(|t| Vector2::new((1.0 + t).sin(), (2.0 * t).exp()), 1e-3);
        assert!((d[0] - 1f64.cos()).abs() < 1e-12);
        assert!((d[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn step_validation() {
        assert!(check_step(1e-4).is_ok());
        assert!(check_step(1e-14).is_err());
        assert!(check_step(f64::NAN).is_err());
    }
}
