//! Special functions: Airy Ai/Bi on a finite window, Hermite polynomials and
//! functions, and the normal CDF.

mod dd;

pub mod airy;
pub mod hermite;

pub use airy::{airy_ai, airy_ai_prime, airy_all, airy_all_with, airy_bi, airy_bi_prime, AiryValues, AIRY_WINDOW};
pub use hermite::{hermite_h, hermite_phi, hermite_phi_ladder, HERMITE_MAX_ORDER};

use crate::error::{Error, Result};

/// Budget and tolerance for series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Maximum number of series terms (≥ 16).
    pub max_terms: usize,
    /// Largest truncation remainder accepted when the term budget is
    /// exhausted before natural convergence; in (0, 1e−6].
    pub abs_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { max_terms: 200, abs_tol: 1e-12 }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 16 {
            return Err(Error::InvalidParameter(format!(
                "max_terms must be >= 16, got {}",
                self.max_terms
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol <= 1e-6) {
            return Err(Error::InvalidParameter(format!(
                "abs_tol must lie in (0, 1e-6], got {}",
                self.abs_tol
            )));
        }
        Ok(())
    }
}

/// Standard normal CDF, Φ(x) = ½ erfc(−x/√2).
///
/// Delegates to `libm`'s erfc (sub-ulp accurate), comfortably inside the
/// 1e−10 oracle tolerance required of it.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_gl;

    #[test]
    fn norm_cdf_reference_points() {
        assert_eq!(norm_cdf(0.0), 0.5);
        assert!((norm_cdf(1.96) - 0.9750021048517795).abs() < 1e-12);
        assert!((norm_cdf(-3.5) - 0.00023262907903552504).abs() < 1e-15);
        assert!((norm_cdf(0.3) - 0.6179114221889527).abs() < 1e-12);
    }

    #[test]
    fn norm_cdf_against_quadrature_oracle() {
        let inv = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        for i in 0..=32 {
            let x = -4.0 + 0.25 * i as f64;
            let oracle = 0.5 + integrate_gl(|u| inv * (-0.5 * u * u).exp(), 0.0, x, 120).unwrap();
            assert!((norm_cdf(x) - oracle).abs() < 1e-10, "mismatch at {x}");
        }
    }

    #[test]
    fn norm_cdf_symmetry_and_monotonicity() {
        let mut prev = 0.0;
        for i in 0..200 {
            let x = -6.0 + 0.06 * i as f64;
            assert!((norm_cdf(x) + norm_cdf(-x) - 1.0).abs() < 1e-12);
            let v = norm_cdf(x);
            assert!(v >= prev);
            prev = v;
        }
        assert!(norm_cdf(-40.0) >= 0.0);
        assert!(norm_cdf(40.0) <= 1.0);
    }

    #[test]
    fn series_control_validation() {
        assert!(SeriesControl::default().validate().is_ok());
        assert!(SeriesControl { max_terms: 8, abs_tol: 1e-12 }.validate().is_err());
        assert!(SeriesControl { max_terms: 50, abs_tol: 1e-3 }.validate().is_err());
        assert!(SeriesControl { max_terms: 50, abs_tol: 0.0 }.validate().is_err());
    }
}
