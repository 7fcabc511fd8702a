//! Model-level quantities: the martingale drift, the Black-Scholes call by
//! closed form / kernel quadrature / Mellin inversion, the Ho-Lee zero-coupon
//! bond, Airy-mode and Hermite-mode solutions, the Galilean numeraire gauge,
//! and the Ho-Lee similarity map.
//!
//! Everything here works at `f64`; tolerances are calibrated to double
//! precision quadrature.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{ModelKind, ModelParams};
use crate::kernels::{bs_kernel, omega_beta};
use crate::quad::integrate_gl;
use crate::special::{airy_ai, airy_bi, hermite_phi_ladder, norm_cdf, HERMITE_MAX_ORDER};
use crate::transforms::{bromwich_invert, QuadratureSpec};

/// A European call to be priced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CallSpec {
    pub spot: f64,
    pub strike: f64,
    pub tau: f64,
    pub sigma: f64,
    pub r: f64,
}

impl CallSpec {
    pub fn new(spot: f64, strike: f64, tau: f64, sigma: f64, r: f64) -> Result<CallSpec> {
        let spec = CallSpec { spot, strike, tau, sigma, r };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("spot", self.spot),
            ("strike", self.strike),
            ("tau", self.tau),
            ("sigma", self.sigma),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidParameter(format!("r must be finite, got {}", self.r)));
        }
        Ok(())
    }

    pub fn log_moneyness(&self) -> f64 {
        (self.spot / self.strike).ln()
    }
}

/// Drift that makes the discounted stock a martingale: `μ = r − ½σ²`.
pub fn martingale_mu(r: f64, sigma: f64) -> f64 {
    r - 0.5 * sigma * sigma
}

/// Lognormal closed form, the oracle for the other three call routes.
pub fn bs_call_closed(spec: &CallSpec) -> Result<f64> {
    spec.validate()?;
    let st = spec.sigma * spec.tau.sqrt();
    let d1 = (spec.log_moneyness() + (spec.r + 0.5 * spec.sigma * spec.sigma) * spec.tau) / st;
    let d2 = d1 - st;
    Ok(spec.spot * norm_cdf(d1) - spec.strike * (-spec.r * spec.tau).exp() * norm_cdf(d2))
}

/// Call price by quadrature of the pricing kernel against the payoff,
/// integrating only over `x′ ≥ ln K` where the integrand is smooth.
pub fn bs_call_kernel(spec: &CallSpec, nodes: usize) -> Result<f64> {
    spec.validate()?;
    let n = nodes.clamp(64, 512);
    let params =
        ModelParams::black_scholes(spec.sigma, spec.r, martingale_mu(spec.r, spec.sigma));
    let x = spec.spot.ln();
    let lower = spec.strike.ln();
    // The e^{x′} payoff factor shifts the effective Gaussian center by σ²τ.
    let center = x + params.mu * spec.tau + spec.sigma * spec.sigma * spec.tau;
    let upper = center.max(lower) + 12.0 * spec.sigma * spec.tau.sqrt();
    integrate_gl(
        |y| {
            bs_kernel(x, y, spec.tau, &params).unwrap_or(f64::NAN) * (y.exp() - spec.strike)
        },
        lower,
        upper,
        n,
    )
}

/// Saddle-adapted contour abscissa and quadrature window for
/// [`bs_call_mellin`]. The abscissa sits at the real stationary point of the
/// integrand's exponent (clamped to 2 from below), which keeps deep
/// out-of-the-money strikes free of cancellation; the half-width is chosen so
/// the Gaussian contour decay reaches ~1e−16.
pub fn mellin_defaults(spec: &CallSpec) -> (f64, QuadratureSpec) {
    let s2t = spec.sigma * spec.sigma * spec.tau;
    let mu = martingale_mu(spec.r, spec.sigma);
    let saddle = ((spec.strike / spec.spot).ln() - mu * spec.tau) / s2t;
    let c = saddle.max(2.0);
    let half_width = (74.0 / s2t).sqrt();
    (c, QuadratureSpec::bromwich(c, half_width, 1 << 13))
}

/// Call price by inverse Mellin transform along `Re p = c`, `c > 1`:
/// the payoff transform `K^{1−p}/(p(p−1))` evolved by `e^{E_r(p)τ}` with
/// `E_r(p) = ½σ²p² + μp − r` and the martingale drift.
pub fn bs_call_mellin(spec: &CallSpec, c: f64, q: &QuadratureSpec) -> Result<f64> {
    bs_call_mellin_with_mu(spec, martingale_mu(spec.r, spec.sigma), c, q)
}

/// [`bs_call_mellin`] with `μ` exposed; the martingale value is the one that
/// reproduces the closed form, which pins the drift convention of the
/// transform route.
pub fn bs_call_mellin_with_mu(
    spec: &CallSpec,
    mu: f64,
    c: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if !mu.is_finite() {
        return Err(Error::InvalidParameter(format!("mu must be finite, got {mu}")));
    }
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::Domain(format!(
            "Mellin contour must lie right of the payoff strip, c > 1; got {c}"
        )));
    }
    let contour = QuadratureSpec::bromwich(c, q.half_width, q.nodes);
    let (s2, tau, ln_k, r) = (spec.sigma * spec.sigma, spec.tau, spec.strike.ln(), spec.r);
    // exp() of the combined exponent keeps the far-contour factors in range.
    let fhat = move |p: Complex64| -> Complex64 {
        let e_r = 0.5 * s2 * p * p + mu * p - r;
        (e_r * tau + (1.0 - p) * ln_k).exp() / (p * (p - 1.0))
    };
    Ok(bromwich_invert(&fhat, &contour, spec.spot.ln())?.value)
}

/// Zero-coupon bond price in the Ho-Lee model with short rate `x`: the
/// Feynman-Kac expectation `E[e^{−β∫x}]`, available in closed form as
/// `Ω_{−β}(x, τ) = exp(−βxτ − μβτ²/2 + β²σ²τ³/6)`.
pub fn holee_bond(x: f64, tau: f64, params: &ModelParams) -> Result<f64> {
    params.validate(ModelKind::HoLee)?;
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("short rate must be finite, got {x}")));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("bond maturity must satisfy tau >= 0, got {tau}")));
    }
    Ok(omega_beta(x, tau, -params.beta, params))
}

/// One Airy eigenmode of the Ho-Lee coordinate-space equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryMode {
    /// Eigenvalue (per unit time) multiplying `e^{λt}`.
    pub lambda: f64,
    /// Coefficient of `Ai`.
    pub a: f64,
    /// Coefficient of `Bi`.
    pub b: f64,
}

/// Evaluate `V = e^{−μx/σ²} e^{λt} (a·Ai(y) + b·Bi(y))` with
/// `y = (2/(σ²β²))^{1/3} (μ²/(2σ²) − λ − βx)`, a solution of the Ho-Lee
/// equation `V_t + ½σ²V_xx + μV_x + βxV = 0`.
pub fn airy_mode_eval(mode: &AiryMode, x: f64, t: f64, params: &ModelParams) -> Result<f64> {
    params.validate(ModelKind::HoLee)?;
    for (name, v) in [("lambda", mode.lambda), ("a", mode.a), ("b", mode.b), ("x", x), ("t", t)]
    {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
        }
    }
    if mode.a == 0.0 && mode.b == 0.0 {
        return Ok(0.0);
    }
    if params.beta == 0.0 {
        return Err(Error::InvalidParameter(
            "Airy modes need beta != 0 (the linear-potential term)".into(),
        ));
    }
    let s2 = params.sigma * params.sigma;
    let scale = (2.0 / (s2 * params.beta * params.beta)).cbrt();
    let y = scale * (params.mu * params.mu / (2.0 * s2) - mode.lambda - params.beta * x);
    let wave = mode.a * airy_ai(y)? + mode.b * airy_bi(y)?;
    Ok((-params.mu * x / s2).exp() * (mode.lambda * t).exp() * wave)
}

/// Hermite-series solution of the harmonic-oscillator equation: coefficients
/// `α_n` of `ψ(τ, x) = Σ_n e^{−ω(n+½)τ} α_n φ_n(λx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteSolution {
    pub coefficients: Vec<f64>,
}

impl HermiteSolution {
    pub fn new(coefficients: Vec<f64>) -> Result<HermiteSolution> {
        let sol = HermiteSolution { coefficients };
        sol.validate()?;
        Ok(sol)
    }

    pub fn validate(&self) -> Result<()> {
        if self.coefficients.is_empty() || self.coefficients.len() > HERMITE_MAX_ORDER {
            return Err(Error::InvalidParameter(format!(
                "need between 1 and {HERMITE_MAX_ORDER} Hermite coefficients, got {}",
                self.coefficients.len()
            )));
        }
        if self.coefficients.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("Hermite coefficients must be finite".into()));
        }
        Ok(())
    }
}

/// Evaluate a Hermite-series solution at `(x, τ)`.
pub fn hermite_solution_eval(
    sol: &HermiteSolution,
    x: f64,
    tau: f64,
    params: &ModelParams,
) -> Result<f64> {
    params.validate(ModelKind::Harmonic)?;
    sol.validate()?;
    if !x.is_finite() || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("x = {x}, tau = {tau} must be finite")));
    }
    let phis = hermite_phi_ladder(sol.coefficients.len() - 1, params.lambda() * x)?;
    let mut acc = 0.0;
    for (n, (&alpha, &phi)) in sol.coefficients.iter().zip(&phis).enumerate() {
        acc += (-params.omega * (n as f64 + 0.5) * tau).exp() * alpha * phi;
    }
    Ok(acc)
}

/// A function sampled on a uniform grid, evaluated off-grid by Catmull-Rom
/// cubic interpolation.
///
/// Nodes themselves (including both endpoints) always evaluate exactly;
/// strict cell interiors need one neighbor node on each side, so the
/// interpolable open interval is `(x₀ + dx, x₀ + (n−2)dx)` plus all nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    x0: f64,
    dx: f64,
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>) -> Result<GridFn> {
        if !x0.is_finite() || !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid needs finite x0 and dx > 0, got x0 = {x0}, dx = {dx}"
            )));
        }
        if values.len() < 4 {
            return Err(Error::InvalidParameter(format!(
                "cubic interpolation needs at least 4 samples, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("grid values must be finite".into()));
        }
        Ok(GridFn { x0, dx, values })
    }

    /// Sample `f` at `n` equally spaced points on `[a, b]`.
    pub fn sample(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<GridFn> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("need a < b, got [{a}, {b}]")));
        }
        if n < 4 {
            return Err(Error::InvalidParameter(format!("need n >= 4 samples, got {n}")));
        }
        let dx = (b - a) / (n - 1) as f64;
        GridFn::new(a, dx, (0..n).map(|i| f(a + i as f64 * dx)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let n = self.values.len();
        let u = (x - self.x0) / self.dx;
        let nearest = u.round();
        if (u - nearest).abs() <= 1e-9 && nearest >= 0.0 && nearest <= (n - 1) as f64 {
            return Ok(self.values[nearest as usize]);
        }
        if !(u > 1.0 && u < (n - 2) as f64) {
            return Err(Error::GridCoverage(format!(
                "x = {x} outside the interpolable window [{}, {}]",
                self.node(1),
                self.node(n - 2)
            )));
        }
        let i = (u.floor() as usize).clamp(1, n - 3);
        let s = u - i as f64;
        let (p0, p1, p2, p3) =
            (self.values[i - 1], self.values[i], self.values[i + 1], self.values[i + 2]);
        Ok(0.5
            * (2.0 * p1
                + s * ((p2 - p0)
                    + s * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3)
                        + s * (3.0 * (p1 - p2) + p3 - p0)))))
    }
}

/// Map a τ-slice of a solution through a boost-plus-gauge factor and return
/// it on the surviving nodes of the same grid.
fn shifted_gauge_map(
    u: &GridFn,
    shift: f64,
    factor: impl Fn(f64) -> f64,
    what: &str,
) -> Result<GridFn> {
    let mut start = None;
    let mut vals = Vec::new();
    for i in 0..u.len() {
        let x = u.node(i);
        match u.eval(x + shift) {
            Ok(v) => {
                if start.is_none() {
                    start = Some(i);
                }
                vals.push(factor(x) * v);
            }
            Err(_) if start.is_none() => continue,
            Err(_) => break,
        }
    }
    match start {
        Some(i0) if vals.len() >= 4 => GridFn::new(u.node(i0), u.dx(), vals),
        _ => Err(Error::GridCoverage(format!(
            "{what} shift {shift} leaves fewer than 4 interpolable nodes"
        ))),
    }
}

/// Galilean numeraire gauge: from a τ-slice of a solution `U` of the
/// backward equation with drift `μ`, build
/// `Ū(x) = exp((v′/σ²)(x + (μ + ½v′)τ)) · U(x + v′τ)`,
/// again a solution of the same equation. Nodes whose boosted source point
/// leaves the grid are trimmed; fewer than 4 survivors is an error.
pub fn numeraire_gauge(
    u: &GridFn,
    tau: f64,
    vprime: f64,
    params: &ModelParams,
) -> Result<GridFn> {
    params.validate(ModelKind::BlackScholes)?;
    if !vprime.is_finite() || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need finite vprime and tau, got {vprime}, {tau}"
        )));
    }
    let rate = vprime / (params.sigma * params.sigma);
    let phase = (params.mu + 0.5 * vprime) * tau;
    shifted_gauge_map(u, vprime * tau, |x| (rate * (x + phase)).exp(), "boost")
}

/// Ho-Lee similarity map: from a τ-slice of a zero-rate Black-Scholes
/// solution `V_BS`, build `V(x) = Ω_β(x, τ) · V_BS(x + ½βσ²τ²)`, a solution
/// of the Ho-Lee equation with potential `βx`. Trimming as in
/// [`numeraire_gauge`].
pub fn holee_similarity_map(
    v_bs: &GridFn,
    beta: f64,
    tau: f64,
    params: &ModelParams,
) -> Result<GridFn> {
    if !beta.is_finite() || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need finite beta and tau, got {beta}, {tau}"
        )));
    }
    let p = ModelParams::ho_lee(params.sigma, params.mu, beta);
    p.validate(ModelKind::HoLee)?;
    let shift = 0.5 * beta * p.sigma * p.sigma * tau * tau;
    shifted_gauge_map(v_bs, shift, |x| omega_beta(x, tau, beta, &p), "similarity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{
        fd_residual_t, fd_residual_tau, holee_kernel, pde_coefficients, propagate, KernelKind,
    };

    const FD: f64 = 1e-3;

    #[test]
    fn martingale_drift_values() {
        assert!((martingale_mu(0.0, std::f64::consts::SQRT_2) + 1.0).abs() < 1e-15);
        assert!(martingale_mu(0.08, 0.4).abs() < 1e-16);
        assert!((martingale_mu(0.05, 0.2) - 0.03).abs() < 1e-16);
    }

    #[test]
    fn call_spec_validation() {
        assert!(CallSpec::new(100.0, 100.0, 1.0, 0.2, 0.05).is_ok());
        for bad in [
            (0.0, 100.0, 1.0, 0.2, 0.05),
            (100.0, -1.0, 1.0, 0.2, 0.05),
            (100.0, 100.0, 0.0, 0.2, 0.05),
            (100.0, 100.0, 1.0, 0.0, 0.05),
            (100.0, 100.0, 1.0, 0.2, f64::NAN),
            (f64::INFINITY, 100.0, 1.0, 0.2, 0.05),
        ] {
            let (s, k, t, v, r) = bad;
            assert!(CallSpec::new(s, k, t, v, r).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn closed_call_limits_bounds_and_monotonicity() {
        let spec = CallSpec::new(100.0, 1e-10, 1.0, 0.2, 0.05).unwrap();
        assert!((bs_call_closed(&spec).unwrap() - 100.0).abs() < 1e-9);
        let spec = CallSpec::new(1.0, 1.0, 1.0, 1e-6, 0.0).unwrap();
        let atm_zero_vol = bs_call_closed(&spec).unwrap();
        assert!(atm_zero_vol >= 0.0 && atm_zero_vol < 1e-6);

        let mut prev_in_sigma = 0.0;
        for k in 0..30 {
            let sigma = 0.05 + 0.02 * k as f64;
            let spec = CallSpec::new(100.0, 110.0, 0.7, sigma, 0.03).unwrap();
            let c = bs_call_closed(&spec).unwrap();
            let intrinsic = (100.0 - 110.0 * (-0.03f64 * 0.7).exp()).max(0.0);
            assert!(c > intrinsic && c < 100.0);
            assert!(c > prev_in_sigma);
            prev_in_sigma = c;
        }
        let mut prev_in_spot = 0.0;
        for k in 0..30 {
            let spot = 60.0 + 5.0 * k as f64;
            let spec = CallSpec::new(spot, 100.0, 1.5, 0.25, 0.02).unwrap();
            let c = bs_call_closed(&spec).unwrap();
            assert!(c > prev_in_spot);
            prev_in_spot = c;
        }
    }

    #[test]
    fn kernel_route_matches_the_closed_form() {
        for strike in [80.0, 100.0, 120.0] {
            for tau in [0.25, 1.0, 2.0] {
                let spec = CallSpec::new(100.0, strike, tau, 0.2, 0.05).unwrap();
                let closed = bs_call_closed(&spec).unwrap();
                let kernel = bs_call_kernel(&spec, 512).unwrap();
                let rel = (kernel - closed).abs() / closed;
                assert!(rel <= 1e-6, "K={strike} tau={tau}: rel {rel}");
            }
        }
    }

    #[test]
    fn mellin_route_matches_and_is_contour_independent() {
        let spec = CallSpec::new(100.0, 100.0, 1.0, 0.2, 0.05).unwrap();
        let closed = bs_call_closed(&spec).unwrap();
        let (_, q) = mellin_defaults(&spec);
        let at_c2 = bs_call_mellin(&spec, 2.0, &q).unwrap();
        assert!((at_c2 - closed).abs() / closed <= 1e-4);
        let lo = bs_call_mellin(&spec, 1.5, &q).unwrap();
        let hi = bs_call_mellin(&spec, 3.0, &q).unwrap();
        assert!((lo - hi).abs() <= 1e-6, "contour dependence {}", (lo - hi).abs());
        assert!(bs_call_mellin(&spec, 1.0, &q).is_err());
        assert!(bs_call_mellin(&spec, 0.5, &q).is_err());
    }

    #[test]
    fn mellin_route_survives_deep_out_of_the_money() {
        let spec = CallSpec::new(100.0, 1000.0, 1.0, 0.2, 0.05).unwrap();
        let closed = bs_call_closed(&spec).unwrap();
        let (c, q) = mellin_defaults(&spec);
        assert!(c > 50.0, "saddle contour expected far right, got {c}");
        let mellin = bs_call_mellin(&spec, c, &q).unwrap();
        assert!(
            (mellin - closed).abs() / closed <= 1e-3,
            "closed {closed:e} vs mellin {mellin:e}"
        );
    }

    #[test]
    fn mellin_drift_convention_is_the_martingale_one() {
        let spec = CallSpec::new(100.0, 100.0, 1.0, 0.2, 0.05).unwrap();
        let closed = bs_call_closed(&spec).unwrap();
        let (_, q) = mellin_defaults(&spec);
        let martingale = bs_call_mellin_with_mu(&spec, martingale_mu(0.05, 0.2), 2.0, &q).unwrap();
        assert!((martingale - closed).abs() / closed <= 1e-4);
        // The r-free alternative reading of the drift misprices decisively.
        let off = bs_call_mellin_with_mu(&spec, 1.0 - 0.5 * 0.04, 2.0, &q).unwrap();
        assert!((off - closed).abs() / closed > 1e-2);
    }

    #[test]
    fn bond_values_and_domain() {
        let params = ModelParams::<f64>::ho_lee(0.01, 0.0, 1.0);
        assert_eq!(holee_bond(0.03, 0.0, &params).unwrap(), 1.0);
        assert!(holee_bond(0.03, -0.5, &params).is_err());
        assert!(holee_bond(f64::NAN, 1.0, &params).is_err());
        let bond = holee_bond(0.03, 2.0, &params).unwrap();
        let expected = (-0.06 + 0.01f64 * 0.01 * 8.0 / 6.0).exp();
        assert!((bond - expected).abs() / expected < 1e-14);
        // Positive rates discount below par on short maturities.
        assert!(bond < 1.0 && bond > 0.0);
    }

    #[test]
    fn bond_log_price_is_cubic_with_the_advertised_coefficients() {
        let params = ModelParams::<f64>::ho_lee(0.3, 0.12, 1.0);
        let x = 0.04;
        // Interpolate ln B through 4 maturities and read off the monomial
        // coefficients by solving the Vandermonde system.
        let taus = [0.5_f64, 1.0, 2.0, 3.0];
        let mut m = [[0.0_f64; 5]; 4];
        for (row, &tau) in taus.iter().enumerate() {
            for col in 0..4 {
                m[row][col] = tau.powi(col as i32);
            }
            m[row][4] = holee_bond(x, tau, &params).unwrap().ln();
        }
        for pivot in 0..4 {
            let inv = 1.0 / m[pivot][pivot];
            for col in 0..5 {
                m[pivot][col] *= inv;
            }
            for row in 0..4 {
                if row != pivot {
                    let f = m[row][pivot];
                    for col in 0..5 {
                        m[row][col] -= f * m[pivot][col];
                    }
                }
            }
        }
        let coeffs = [m[0][4], m[1][4], m[2][4], m[3][4]];
        assert!((coeffs[0]).abs() <= 1e-9);
        assert!((coeffs[1] - (-x)).abs() <= 1e-9);
        assert!((coeffs[2] - (-0.5 * params.mu)).abs() <= 1e-9);
        assert!((coeffs[3] - params.sigma * params.sigma / 6.0).abs() <= 1e-9);
    }

    #[test]
    fn bond_solves_the_discounting_pde() {
        let params = ModelParams::<f64>::ho_lee(0.3, 0.12, 1.0);
        // Discounting at rate x is the β = −1 potential.
        let oracle = ModelParams::<f64>::ho_lee(0.3, 0.12, -1.0);
        let (a, b, c) = pde_coefficients(KernelKind::HoLee, &oracle);
        let u = |x: f64, tau: f64| holee_bond(x, tau, &params).unwrap();
        for x in [-0.02, 0.0, 0.04, 0.1] {
            for tau in [0.5, 1.0, 2.5] {
                let res = fd_residual_tau(&u, a, b, c.as_ref(), x, tau, FD, FD).abs();
                assert!(res <= 1e-6, "x={x} tau={tau}: {res}");
            }
        }
    }

    #[test]
    fn airy_mode_example_reduces_to_ai_of_minus_x() {
        let params = ModelParams::<f64>::ho_lee(std::f64::consts::SQRT_2, 0.0, 1.0);
        let mode = AiryMode { lambda: 0.0, a: 1.0, b: 0.0 };
        for x in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            let v = airy_mode_eval(&mode, x, 0.7, &params).unwrap();
            assert!((v - airy_ai(-x).unwrap()).abs() < 1e-15);
        }
        let (a, b, c) = pde_coefficients(KernelKind::HoLee, &params);
        let v = |x: f64, t: f64| airy_mode_eval(&mode, x, t, &params).unwrap();
        for x in [-2.5, -1.0, 0.0, 1.5, 2.5] {
            for t in [0.2, 1.0] {
                let res = fd_residual_t(&v, a, b, c.as_ref(), x, t, FD, FD).abs();
                assert!(res <= 1e-5, "x={x} t={t}: {res}");
            }
        }
    }

    #[test]
    fn airy_mode_edge_cases() {
        let params = ModelParams::<f64>::ho_lee(std::f64::consts::SQRT_2, 0.0, 1.0);
        let zero = AiryMode { lambda: 0.0, a: 0.0, b: 0.0 };
        assert_eq!(airy_mode_eval(&zero, 100.0, 1.0, &params).unwrap(), 0.0);
        let mode = AiryMode { lambda: 0.0, a: 1.0, b: 0.0 };
        assert!(airy_mode_eval(&mode, 100.0, 1.0, &params).is_err());
        let flat = ModelParams::<f64>::ho_lee(1.0, 0.0, 0.0);
        assert!(airy_mode_eval(&mode, 0.0, 0.0, &flat).is_err());
        let bad = AiryMode { lambda: f64::NAN, a: 1.0, b: 0.0 };
        assert!(airy_mode_eval(&bad, 0.0, 0.0, &params).is_err());
    }

    #[test]
    fn airy_mode_superpositions_still_solve_the_pde() {
        let params = ModelParams::<f64>::ho_lee(1.1, 0.4, 0.7);
        let m1 = AiryMode { lambda: 0.3, a: 1.0, b: 0.2 };
        let m2 = AiryMode { lambda: -0.1, a: 0.5, b: -0.3 };
        let v = |x: f64, t: f64| {
            airy_mode_eval(&m1, x, t, &params).unwrap()
                + airy_mode_eval(&m2, x, t, &params).unwrap()
        };
        let (a, b, c) = pde_coefficients(KernelKind::HoLee, &params);
        for x in [-1.5, -0.4, 0.3, 1.2] {
            for t in [0.3, 0.9] {
                let res = fd_residual_t(&v, a, b, c.as_ref(), x, t, FD, FD).abs();
                assert!(res <= 1e-5, "x={x} t={t}: {res}");
            }
        }
        // Linearity: scaling a mode's coefficients scales its value.
        let doubled = AiryMode { lambda: 0.3, a: 2.0, b: 0.4 };
        let (one, two) = (
            airy_mode_eval(&m1, 0.4, 0.6, &params).unwrap(),
            airy_mode_eval(&doubled, 0.4, 0.6, &params).unwrap(),
        );
        assert!((two - 2.0 * one).abs() < 1e-15);
    }

    #[test]
    fn hermite_solution_decay_rates() {
        let params = ModelParams::<f64>::harmonic(0.8, 1.1);
        let lambda = params.lambda();
        let x = 1.3 / lambda;
        for (n, len) in [(0usize, 1usize), (2, 3)] {
            let mut coeffs = vec![0.0; len];
            coeffs[n] = 1.0;
            let sol = HermiteSolution::new(coeffs).unwrap();
            let base = hermite_solution_eval(&sol, x, 0.4, &params).unwrap();
            let later = hermite_solution_eval(&sol, x, 0.9, &params).unwrap();
            let rate = -(later / base).ln() / 0.5;
            let expected = params.omega * (n as f64 + 0.5);
            assert!((rate - expected).abs() <= 1e-8, "n={n}: rate {rate} vs {expected}");
        }
    }

    #[test]
    fn hermite_solution_validation() {
        assert!(HermiteSolution::new(vec![]).is_err());
        assert!(HermiteSolution::new(vec![0.0; 61]).is_err());
        assert!(HermiteSolution::new(vec![1.0, f64::NAN]).is_err());
        assert!(HermiteSolution::new(vec![0.0; 60]).is_ok());
    }

    #[test]
    fn hermite_solution_agrees_with_mehler_propagation() {
        let params = ModelParams::<f64>::harmonic(0.8, 1.1);
        let sol = HermiteSolution::new(vec![0.4, -0.3, 0.25, 0.1]).unwrap();
        let tau = 0.7;
        let initial = |y: f64| hermite_solution_eval(&sol, y, 0.0, &params).unwrap();
        let grid = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let q = QuadratureSpec::real_line(12.0, 4097);
        let propagated =
            propagate(KernelKind::Mehler, &initial, tau, &grid, &params, &q).unwrap();
        for (&x, &num) in grid.iter().zip(&propagated) {
            let direct = hermite_solution_eval(&sol, x, tau, &params).unwrap();
            assert!((num - direct).abs() <= 1e-6, "x={x}: {num} vs {direct}");
        }
    }

    #[test]
    fn hermite_solution_solves_the_oscillator_pde() {
        let params = ModelParams::<f64>::harmonic(0.8, 1.1);
        let sol = HermiteSolution::new(vec![0.4, -0.3, 0.25, 0.1]).unwrap();
        let (a, b, c) = pde_coefficients(KernelKind::Mehler, &params);
        let u = |x: f64, tau: f64| hermite_solution_eval(&sol, x, tau, &params).unwrap();
        for x in [-1.0, -0.3, 0.4, 1.1] {
            for tau in [0.5, 1.2] {
                let res = fd_residual_tau(&u, a, b, c.as_ref(), x, tau, FD, FD).abs();
                assert!(res <= 1e-5, "x={x} tau={tau}: {res}");
            }
        }
    }

    #[test]
    fn grid_fn_interpolation_basics() {
        assert!(GridFn::new(0.0, 0.0, vec![0.0; 8]).is_err());
        assert!(GridFn::new(0.0, 0.1, vec![0.0; 3]).is_err());
        assert!(GridFn::new(0.0, 0.1, vec![f64::NAN; 8]).is_err());
        assert!(GridFn::sample(1.0, 0.0, 8, |x| x).is_err());

        let g = GridFn::sample(-1.0, 1.0, 41, |x| x * x).unwrap();
        // Nodes, including both endpoints, are exact.
        assert_eq!(g.eval(-1.0).unwrap(), g.values()[0]);
        assert_eq!(g.eval(1.0).unwrap(), g.values()[40]);
        // Catmull-Rom reproduces quadratics in the interior.
        for k in 0..100 {
            let x = -0.94 + 0.019 * k as f64;
            assert!((g.eval(x).unwrap() - x * x).abs() < 1e-14);
        }
        // Half a cell beyond the first node there is no left neighbor.
        assert!(g.eval(-1.0 + 0.025).is_err());
        assert!(g.eval(1.0 - 0.025).is_err());
        assert!(g.eval(-1.2).is_err());
        assert!(g.eval(1.2).is_err());
    }

    #[test]
    fn numeraire_gauge_identity_and_coverage() {
        let params = ModelParams::<f64>::black_scholes(0.8, 0.0, 0.2);
        let g = GridFn::sample(-1.0, 1.0, 101, |x| (0.3 * x).sin()).unwrap();
        let same = numeraire_gauge(&g, 0.7, 0.0, &params).unwrap();
        assert_eq!(g, same);
        assert!(numeraire_gauge(&g, 0.7, 4.0, &params).is_err());
    }

    #[test]
    fn gauge_factor_itself_solves_the_pricing_equation() {
        let params = ModelParams::<f64>::black_scholes(0.8, 0.05, 0.2);
        let vprime = 0.3;
        let s2 = params.sigma * params.sigma;
        let phi = |x: f64, tau: f64| {
            (-params.r * tau).exp()
                * (vprime / s2 * (x + (params.mu + 0.5 * vprime) * tau)).exp()
        };
        let (a, b, c) = pde_coefficients(KernelKind::Bs, &params);
        for x in [-0.5, 0.0, 0.8] {
            for tau in [0.4, 1.1] {
                let res = fd_residual_tau(&phi, a, b, c.as_ref(), x, tau, FD, FD).abs();
                assert!(res <= 1e-6, "x={x} tau={tau}: {res}");
            }
        }
    }

    #[test]
    fn gauge_transformed_kernel_still_solves_the_pricing_equation() {
        let params = ModelParams::<f64>::black_scholes(0.8, 0.05, 0.2);
        let vprime = 0.3;
        let xprime = 0.2;
        // dx divides both the x-stencil step and v′h_t, so every sample the
        // residual stencil requests lands exactly on a grid node.
        let n = 24001;
        let u = |x: f64, tau: f64| {
            let slice = GridFn::sample(-1.2, 1.2, n, |y| {
                bs_kernel(y, xprime, tau, &params).unwrap()
            })
            .unwrap();
            numeraire_gauge(&slice, tau, vprime, &params).unwrap().eval(x).unwrap()
        };
        let (a, b, c) = pde_coefficients(KernelKind::Bs, &params);
        for x in [-0.3, 0.0, 0.4] {
            for tau in [0.5, 0.9] {
                let res = fd_residual_tau(&u, a, b, c.as_ref(), x, tau, FD, FD).abs();
                assert!(res <= 1e-5, "x={x} tau={tau}: {res}");
            }
        }
    }

    #[test]
    fn similarity_map_identity_and_coverage() {
        let params = ModelParams::<f64>::ho_lee(1.0, 0.1, 0.5);
        let g = GridFn::sample(-1.0, 1.0, 101, |x| (0.4 * x).cos()).unwrap();
        let same = holee_similarity_map(&g, 0.0, 0.8, &params).unwrap();
        assert_eq!(g, same);
        assert!(holee_similarity_map(&g, 8.0, 3.0, &params).is_err());
    }

    #[test]
    fn similarity_map_of_unity_is_omega_beta() {
        let params = ModelParams::<f64>::ho_lee(1.0, 0.1, 0.5);
        let (beta, tau) = (0.5, 0.6);
        let g = GridFn::sample(-1.0, 1.0, 2001, |_| 1.0).unwrap();
        let mapped = holee_similarity_map(&g, beta, tau, &params).unwrap();
        for i in (0..mapped.len()).step_by(97) {
            let x = mapped.node(i);
            let expect = omega_beta(x, tau, beta, &params);
            assert!((mapped.values()[i] - expect).abs() / expect <= 1e-12);
        }
        // Ω_β is itself a solution of the βx-potential equation.
        let w = |x: f64, t: f64| omega_beta(x, t, beta, &params);
        let (a, b, c) = pde_coefficients(KernelKind::HoLee, &params);
        for x in [-0.8, 0.0, 0.7] {
            for t in [0.4, 0.9] {
                let res = fd_residual_tau(&w, a, b, c.as_ref(), x, t, FD, FD).abs();
                assert!(res <= 1e-6, "x={x} t={t}: {res}");
            }
        }
    }

    #[test]
    fn similarity_map_sends_the_bs_kernel_to_the_holee_kernel() {
        let params = ModelParams::<f64>::ho_lee(1.0, 0.1, 0.5);
        let bs = ModelParams::<f64>::black_scholes(1.0, 0.0, 0.1);
        let (beta, tau, xprime) = (0.5, 0.6, 0.15);
        // Shift ½βσ²τ² = 0.09 is a whole number of grid cells.
        let slice =
            GridFn::sample(-3.0, 3.0, 60001, |y| bs_kernel(y, xprime, tau, &bs).unwrap())
                .unwrap();
        let mapped = holee_similarity_map(&slice, beta, tau, &params).unwrap();
        for k in 0..=40 {
            let x = -1.0 + 0.05 * k as f64;
            let got = mapped.eval(x).unwrap();
            let expect = holee_kernel(x, xprime, tau, &params).unwrap();
            assert!((got - expect).abs() <= 1e-6, "x={x}: {got} vs {expect}");
        }
    }

    #[test]
    fn similarity_mapped_solution_has_small_pde_residual() {
        let params = ModelParams::<f64>::ho_lee(0.9, 0.15, 0.37);
        let (beta, growth) = (0.37, 0.8);
        let s2 = params.sigma * params.sigma;
        // An exponential zero-rate Black-Scholes solution, deliberately not
        // grid-aligned after the shift.
        let v_bs = move |x: f64, tau: f64| {
            (growth * x + (0.5 * s2 * growth * growth + params.mu * growth) * tau).exp()
        };
        let v = |x: f64, tau: f64| {
            let slice = GridFn::sample(-1.0, 1.0, 8001, |y| v_bs(y, tau)).unwrap();
            holee_similarity_map(&slice, beta, tau, &params).unwrap().eval(x).unwrap()
        };
        let (a, b, c) = pde_coefficients(KernelKind::HoLee, &params);
        for x in [-0.4, 0.0, 0.5] {
            for tau in [0.53, 0.9] {
                let res = fd_residual_tau(&v, a, b, c.as_ref(), x, tau, FD, FD).abs();
                assert!(res <= 1e-4, "x={x} tau={tau}: {res}");
            }
        }
    }
}
