//! Hermite polynomials (physicists' convention) and the orthonormal
//! Hermite functions φ_n.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest order accepted; keeps recurrence round-off well below test
/// tolerances and matches the truncation used by the kernel series.
pub const HERMITE_MAX_ORDER: usize = 60;

fn check_order(n: usize) -> Result<()> {
    if n > HERMITE_MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "Hermite order {n} exceeds the supported maximum {HERMITE_MAX_ORDER}"
        )));
    }
    Ok(())
}

/// H_n(x) by the upward recurrence H_{n+1} = 2xH_n − 2nH_{n−1}.
pub fn hermite_h<T: Real>(n: usize, x: T) -> Result<T> {
    check_order(n)?;
    let mut h0 = T::one();
    if n == 0 {
        return Ok(h0);
    }
    let mut h1 = T::two() * x;
    for k in 1..n {
        let h2 = T::two() * (x * h1 - T::of(k as f64) * h0);
        h0 = h1;
        h1 = h2;
    }
    Ok(h1)
}

/// Orthonormal Hermite function φ_n(x) = (2ⁿn!√π)^{−1/2} H_n(x) e^{−x²/2}.
///
/// Evaluated by the *normalized* recurrence
/// `φ_{n+1} = x√(2/(n+1)) φ_n − √(n/(n+1)) φ_{n−1}` starting from
/// `φ_0 = π^{−1/4} e^{−x²/2}`, so every intermediate stays O(1): no overflow
/// for any n ≤ 60, |x| ≤ 8 (or far beyond).
pub fn hermite_phi<T: Real>(n: usize, x: T) -> Result<T> {
    check_order(n)?;
    let mut p0 = T::of(std::f64::consts::PI).powf(-T::of(0.25)) * (-x * x * T::half()).exp();
    if n == 0 {
        return Ok(p0);
    }
    let mut p1 = x * T::two().sqrt() * p0;
    for k in 1..n {
        let kf = T::of(k as f64);
        let kp1 = T::of((k + 1) as f64);
        let p2 = x * (T::two() / kp1).sqrt() * p1 - (kf / kp1).sqrt() * p0;
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

/// The whole ladder φ_0(x), …, φ_n(x) in one pass of the recurrence.
pub fn hermite_phi_ladder<T: Real>(n: usize, x: T) -> Result<Vec<T>> {
    check_order(n)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut p0 = T::of(std::f64::consts::PI).powf(-T::of(0.25)) * (-x * x * T::half()).exp();
    out.push(p0);
    if n == 0 {
        return Ok(out);
    }
    let mut p1 = x * T::two().sqrt() * p0;
    out.push(p1);
    for k in 1..n {
        let kf = T::of(k as f64);
        let kp1 = T::of((k + 1) as f64);
        let p2 = x * (T::two() / kp1).sqrt() * p1 - (kf / kp1).sqrt() * p0;
        out.push(p2);
        p0 = p1;
        p1 = p2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_gl;

    #[test]
    fn polynomial_base_cases_and_h2() {
        assert_eq!(hermite_h(0, 0.37).unwrap(), 1.0);
        assert_eq!(hermite_h(1, 0.37).unwrap(), 0.74);
        // H_2(1) = 4·1 − 2 = 2.
        assert_eq!(hermite_h(2, 1.0).unwrap(), 2.0);
        // H_5(0.9) against 32x⁵ − 160x³ + 120x.
        assert!((hermite_h::<f64>(5, 0.9).unwrap() - 10.25568).abs() < 1e-10);
    }

    #[test]
    fn parity() {
        for n in [0usize, 1, 4, 7, 33, 60] {
            for &x in &[0.31, 1.7, 2.9] {
                let plus = hermite_h::<f64>(n, x).unwrap();
                let minus = hermite_h(n, -x).unwrap();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(minus, sign * plus, "H_{n} parity at {x}");
                let pp = hermite_phi::<f64>(n, x).unwrap();
                let pm = hermite_phi(n, -x).unwrap();
                assert!((pm - sign * pp).abs() < 1e-15, "phi_{n} parity at {x}");
            }
        }
    }

    #[test]
    fn phi_reference_values() {
        assert!((hermite_phi::<f64>(0, 0.0).unwrap() - 0.7511255444649425).abs() < 1e-15);
        assert_eq!(hermite_phi(1, 0.0).unwrap(), 0.0);
        assert!((hermite_phi::<f64>(3, 0.7).unwrap() - -0.479953503096114).abs() < 1e-13);
        assert!((hermite_phi::<f64>(12, 1.3).unwrap() - 0.35918124326387973).abs() < 1e-13);
        assert!((hermite_phi::<f64>(40, 2.0).unwrap() - 0.1459602420608101).abs() < 1e-13);
    }

    #[test]
    fn phi_matches_the_unnormalized_definition() {
        // Cross-check against H_n e^{−x²/2} with explicit normalization for
        // orders where 2ⁿn! is exactly representable.
        for n in [2usize, 5, 9] {
            for &x in &[-1.3, 0.4, 2.2] {
                let norm = (2f64.powi(n as i32)
                    * (1..=n).map(|k| k as f64).product::<f64>()
                    * std::f64::consts::PI.sqrt())
                .sqrt();
                let direct = hermite_h::<f64>(n, x).unwrap() * (-0.5 * x * x).exp() / norm;
                let phi = hermite_phi(n, x).unwrap();
                assert!((phi - direct).abs() < 1e-12, "n={n}, x={x}");
            }
        }
    }

    #[test]
    fn orthonormality_by_quadrature() {
        for m in 0..=12usize {
            for n in m..=12usize {
                let val = integrate_gl(
                    |x| hermite_phi(m, x).unwrap() * hermite_phi(n, x).unwrap(),
                    -10.0,
                    10.0,
                    200,
                )
                .unwrap();
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((val - expected).abs() < 1e-8, "<phi_{m}, phi_{n}> = {val}");
            }
        }
    }

    #[test]
    fn eigenrelation_by_finite_differences() {
        // φ″ − x²φ = −(2n+1)φ with a 5-point stencil.
        let h = 1e-3;
        for n in [0usize, 3, 8] {
            for i in 0..=16 {
                let x = -4.0 + 0.5 * i as f64;
                let f = |y: f64| hermite_phi(n, y).unwrap();
                let d2 = (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h)
                    - f(x + 2.0 * h))
                    / (12.0 * h * h);
                let res = (d2 - x * x * f(x) + (2.0 * n as f64 + 1.0) * f(x)).abs();
                assert!(res < 1e-5, "eigenrelation residual {res} at n={n}, x={x}");
            }
        }
    }

    #[test]
    fn no_overflow_in_the_supported_box() {
        for n in [59usize, 60] {
            for &x in &[-8.0, 8.0] {
                let v = hermite_phi::<f64>(n, x).unwrap();
                assert!(v.is_finite() && v.abs() < 1.0);
            }
        }
    }

    #[test]
    fn rejects_large_orders() {
        assert!(hermite_h(61, 1.0f64).is_err());
        assert!(hermite_phi(61, 1.0f64).is_err());
    }

    #[test]
    fn works_in_f32() {
        let v = hermite_phi(4, 0.5f32).unwrap();
        let w = hermite_phi(4, 0.5f64).unwrap();
        assert!((v as f64 - w).abs() < 1e-5);
    }

    #[test]
    fn ladder_agrees_with_single_evaluations() {
        let ladder = hermite_phi_ladder(25, 1.37f64).unwrap();
        assert_eq!(ladder.len(), 26);
        for (n, &v) in ladder.iter().enumerate() {
            assert_eq!(v, hermite_phi(n, 1.37f64).unwrap());
        }
        assert!(hermite_phi_ladder(61, 0.0f64).is_err());
    }
}
