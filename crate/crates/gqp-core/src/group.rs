//! The centrally extended Weyl-symplectic group law for four one-factor
//! models.
//!
//! Elements are `(t, p, x, ζ)` with `ζ ∈ ℝ⁺` the fiber coordinate. The base
//! law acts on the row vector `u = (p, x)` through a one-parameter SL(2,ℝ)
//! subgroup `M(t)` selected by the model, and the fiber picks up the model's
//! cocycle:
//!
//! ```text
//! (t″, u″, ζ″) = (t′ + t,  u′·M(t) + u,  ζ′ ζ e^{ε(g′,g)})
//! ```
//!
//! Composition argument order is `compose(g2, g1) = g2 ∘ g1` with the *left*
//! argument primed (it acts after `g1`). All cocycles here vanish when either
//! factor is the identity and satisfy the associativity identity
//! `ε(a,b) + ε(ab,c) = ε(a,bc) + ε(b,c)` to round-off.
//!
//! The interest rate `r` never enters the group law; it is a fiber coordinate
//! change `ζ → ζ e^{rt}` applied downstream by the geometry layer.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which one-factor model's group law to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Free-particle law with drift coboundary: log-price dynamics.
    BlackScholes,
    /// Black-Scholes base law plus the short-rate cocycle in `β`.
    HoLee,
    /// Hyperbolic rotations: Euclidean (attractive) oscillator.
    Harmonic,
    /// Elliptic rotations: repulsive (inverted) oscillator.
    Repulsive,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::BlackScholes,
        ModelKind::HoLee,
        ModelKind::Harmonic,
        ModelKind::Repulsive,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::BlackScholes => "black-scholes",
            ModelKind::HoLee => "ho-lee",
            ModelKind::Harmonic => "harmonic",
            ModelKind::Repulsive => "repulsive",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bs" | "black-scholes" | "blackscholes" => Ok(ModelKind::BlackScholes),
            "holee" | "ho-lee" => Ok(ModelKind::HoLee),
            "harmonic" => Ok(ModelKind::Harmonic),
            "repulsive" => Ok(ModelKind::Repulsive),
            other => Err(Error::InvalidParameter(format!(
                "unknown model '{other}' (expected bs|ho-lee|harmonic|repulsive)"
            ))),
        }
    }
}

/// Model parameters. Irrelevant fields for a given model are ignored by the
/// group law (`r` always, `μ` for the oscillators) but kept in one struct so
/// that every layer shares a single parameter vocabulary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T = f64> {
    /// Volatility σ > 0.
    pub sigma: T,
    /// Continuously compounded rate (Black-Scholes discounting only).
    pub r: T,
    /// Drift μ of the log-price (numeraire coboundary parameter).
    pub mu: T,
    /// Short-rate coupling β (Ho-Lee only).
    pub beta: T,
    /// Oscillator frequency ω > 0 (harmonic/repulsive only).
    pub omega: T,
}

impl<T: Real> ModelParams<T> {
    pub fn black_scholes(sigma: T, r: T, mu: T) -> Self {
        ModelParams { sigma, r, mu, beta: T::zero(), omega: T::zero() }
    }

    pub fn ho_lee(sigma: T, mu: T, beta: T) -> Self {
        ModelParams { sigma, r: T::zero(), mu, beta, omega: T::zero() }
    }

    pub fn harmonic(sigma: T, omega: T) -> Self {
        ModelParams { sigma, r: T::zero(), mu: T::zero(), beta: T::zero(), omega }
    }

    pub fn repulsive(sigma: T, omega: T) -> Self {
        Self::harmonic(sigma, omega)
    }

    /// λ = √(ω)/σ, the oscillator length scale (λ² = ω/σ²).
    pub fn lambda(&self) -> T {
        self.omega.sqrt() / self.sigma
    }

    /// γ = ω²/σ², the quadratic-potential coupling in the pricing PDE.
    pub fn gamma(&self) -> T {
        self.omega * self.omega / (self.sigma * self.sigma)
    }

    pub fn validate(&self, model: ModelKind) -> Result<()> {
        if !(self.sigma > T::zero()) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be > 0, got {}", self.sigma)));
        }
        for (name, v) in [("r", self.r), ("mu", self.mu), ("beta", self.beta)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        match model {
            ModelKind::Harmonic | ModelKind::Repulsive => {
                if !(self.omega > T::zero()) || !self.omega.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "omega must be > 0 for {model}, got {}",
                        self.omega
                    )));
                }
            }
            ModelKind::BlackScholes | ModelKind::HoLee => {
                if !self.omega.is_finite() {
                    return Err(Error::InvalidParameter("omega must be finite".into()));
                }
            }
        }
        Ok(())
    }
}

/// A group element `(t, p, x, ζ)`, ζ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement<T = f64> {
    pub t: T,
    pub p: T,
    pub x: T,
    pub zeta: T,
}

impl<T: Real> GroupElement<T> {
    pub fn new(t: T, p: T, x: T, zeta: T) -> Result<Self> {
        let g = GroupElement { t, p, x, zeta };
        g.validate()?;
        Ok(g)
    }

    pub fn identity() -> Self {
        GroupElement { t: T::zero(), p: T::zero(), x: T::zero(), zeta: T::one() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t", self.t), ("p", self.p), ("x", self.x)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if !(self.zeta > T::zero()) || !self.zeta.is_finite() {
            return Err(Error::InvalidParameter(format!("zeta must be > 0, got {}", self.zeta)));
        }
        Ok(())
    }

    pub fn ln_zeta(&self) -> T {
        self.zeta.ln()
    }

    /// Largest coordinate discrepancy, measuring ζ in the log domain (the
    /// fiber is multiplicative, so |Δ ln ζ| is the scale-free residual).
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let dt = (self.t - other.t).abs();
        let dp = (self.p - other.p).abs();
        let dx = (self.x - other.x).abs();
        let dz = (self.ln_zeta() - other.ln_zeta()).abs();
        dt.max(dp).max(dx).max(dz)
    }
}

/// A real 2×2 matrix `[[a, b], [c, d]]` acting on row vectors `(p, x)` from
/// the right: `(p, x)·M = (a p + c x, b p + d x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2Matrix<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> Sl2Matrix<T> {
    /// Build a matrix, enforcing `|det − 1| ≤ 1e−12` (scaled by the entry
    /// magnitude so that large hyperbolic matrices are not rejected for
    /// round-off alone).
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let m = Sl2Matrix { a, b, c, d };
        let scale = T::one().max(a.abs()).max(b.abs()).max(c.abs()).max(d.abs());
        if (m.det() - T::one()).abs() > T::of(1e-12) * scale * scale {
            return Err(Error::InvalidParameter(format!(
                "matrix determinant {} is not 1",
                m.det()
            )));
        }
        Ok(m)
    }

    /// Build without the determinant check (for deliberately non-symplectic
    /// inputs to `symplectic_residual`).
    pub fn new_unchecked(a: T, b: T, c: T, d: T) -> Self {
        Sl2Matrix { a, b, c, d }
    }

    pub fn identity() -> Self {
        Sl2Matrix { a: T::one(), b: T::zero(), c: T::zero(), d: T::one() }
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        Sl2Matrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Inverse of a unit-determinant matrix: `[[d, −b], [−c, a]]`.
    pub fn inverse(&self) -> Self {
        Sl2Matrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Row action `(p, x) · M`.
    pub fn apply_row(&self, p: T, x: T) -> (T, T) {
        (self.a * p + self.c * x, self.b * p + self.d * x)
    }
}

/// The one-parameter SL(2,ℝ) subgroup generating the model's base dynamics.
///
/// * Black-Scholes / Ho-Lee: parabolic, `[[1, σ²t], [0, 1]]`
/// * Harmonic: hyperbolic, `[[cosh ωt, λ⁻² sinh ωt], [λ² sinh ωt, cosh ωt]]`
/// * Repulsive: elliptic, `[[cos ωt, λ⁻² sin ωt], [−λ² sin ωt, cos ωt]]`
pub fn sl2_generator<T: Real>(model: ModelKind, t: T, params: &ModelParams<T>) -> Result<Sl2Matrix<T>> {
    params.validate(model)?;
    let m = match model {
        ModelKind::BlackScholes | ModelKind::HoLee => Sl2Matrix {
            a: T::one(),
            b: params.sigma * params.sigma * t,
            c: T::zero(),
            d: T::one(),
        },
        ModelKind::Harmonic => {
            let (l2, w) = (params.lambda() * params.lambda(), params.omega);
            let (ch, sh) = ((w * t).cosh(), (w * t).sinh());
            Sl2Matrix { a: ch, b: sh / l2, c: sh * l2, d: ch }
        }
        ModelKind::Repulsive => {
            let (l2, w) = (params.lambda() * params.lambda(), params.omega);
            let (cs, sn) = ((w * t).cos(), (w * t).sin());
            Sl2Matrix { a: cs, b: sn / l2, c: -sn * l2, d: cs }
        }
    };
    Ok(m)
}

/// Max-norm of `MᵀΩM − Ω`, with `Ω = [[0, 1], [−1, 0]]`. Zero exactly when
/// `M` is symplectic; for 2×2 matrices `MᵀΩM = det(M)·Ω`, so the residual is
/// `|det − 1|`.
pub fn symplectic_residual<T: Real>(m: &Sl2Matrix<T>) -> T {
    (m.det() - T::one()).abs()
}

/// The model cocycle `ε(g′, g) = ln(ζ″ / (ζ′ζ))` with the left argument
/// primed. Vanishes identically when either argument is the identity, and on
/// the pure time-translation subgroup (every term carries a `p` or `x`).
pub fn cocycle<T: Real>(
    model: ModelKind,
    g2: &GroupElement<T>,
    g1: &GroupElement<T>,
    params: &ModelParams<T>,
) -> Result<T> {
    params.validate(model)?;
    g2.validate()?;
    g1.validate()?;
    let (s2, half) = (params.sigma * params.sigma, T::half());
    let eps = match model {
        ModelKind::BlackScholes | ModelKind::HoLee => {
            // Galilean cocycle plus the numeraire (drift) coboundary.
            let galilean = g2.x * g1.p + s2 * g1.t * (g2.p * g1.p + half * g2.p * g2.p);
            let numeraire = params.mu * g2.p * g1.t;
            let base = galilean + numeraire;
            if model == ModelKind::HoLee {
                // Short-rate cocycle: couples the rate coordinate to time.
                base + params.beta * g1.t * (g2.x + half * s2 * g2.p * g1.t)
            } else {
                base
            }
        }
        ModelKind::Harmonic => {
            let l2 = params.lambda() * params.lambda();
            let a = params.omega * g1.t;
            half * (g2.x * g1.p - g2.p * g1.x) * a.cosh()
                + half * (g2.p * g1.p / l2 - l2 * g2.x * g1.x) * a.sinh()
        }
        ModelKind::Repulsive => {
            let l2 = params.lambda() * params.lambda();
            let a = params.omega * g1.t;
            half * (g2.x * g1.p - g2.p * g1.x) * a.cos()
                + half * (g2.p * g1.p / l2 + l2 * g2.x * g1.x) * a.sin()
        }
    };
    Ok(eps)
}

/// Group composition `g2 ∘ g1` (left argument primed, acting after `g1`).
pub fn compose<T: Real>(
    model: ModelKind,
    g2: &GroupElement<T>,
    g1: &GroupElement<T>,
    params: &ModelParams<T>,
) -> Result<GroupElement<T>> {
    let eps = cocycle(model, g2, g1, params)?;
    let m = sl2_generator(model, g1.t, params)?;
    let (p, x) = m.apply_row(g2.p, g2.x);
    Ok(GroupElement {
        t: g2.t + g1.t,
        p: p + g1.p,
        x: x + g1.x,
        zeta: g2.zeta * g1.zeta * eps.exp(),
    })
}

/// Two-sided group inverse.
///
/// The base part is `(−t, −u·M(−t))`; the fiber must absorb the cocycle of
/// the inverse pair, `ζ⁻¹ e^{−ε(g⁻¹, g)}`, which reduces to the bare `1/ζ`
/// exactly when `ε(g⁻¹, g) = 0` (true for the oscillators' antisymmetric
/// cocycles, not for the drift/rate coboundary terms).
pub fn inverse<T: Real>(
    model: ModelKind,
    g: &GroupElement<T>,
    params: &ModelParams<T>,
) -> Result<GroupElement<T>> {
    params.validate(model)?;
    g.validate()?;
    let minv = sl2_generator(model, -g.t, params)?;
    let (p, x) = minv.apply_row(g.p, g.x);
    let base = GroupElement { t: -g.t, p: -p, x: -x, zeta: T::one() };
    let eps = cocycle(model, &base, g, params)?;
    Ok(GroupElement { zeta: (g.zeta * eps.exp()).recip(), ..base })
}

/// Associativity residual of the cocycle:
/// `|ε(g3,g2) + ε(g3∘g2, g1) − ε(g3, g2∘g1) − ε(g2,g1)|`.
pub fn cocycle_identity_residual<T: Real>(
    model: ModelKind,
    g3: &GroupElement<T>,
    g2: &GroupElement<T>,
    g1: &GroupElement<T>,
    params: &ModelParams<T>,
) -> Result<T> {
    let e32 = cocycle(model, g3, g2, params)?;
    let e21 = cocycle(model, g2, g1, params)?;
    let g32 = compose(model, g3, g2, params)?;
    let g21 = compose(model, g2, g1, params)?;
    let left = e32 + cocycle(model, &g32, g1, params)?;
    let right = cocycle(model, g3, &g21, params)? + e21;
    Ok((left - right).abs())
}

/// Heisenberg-Weyl element `(p, x, θ)` with additive central coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HwElement<T = f64> {
    pub p: T,
    pub x: T,
    pub theta: T,
}

impl<T: Real> HwElement<T> {
    pub fn new(p: T, x: T, theta: T) -> Self {
        HwElement { p, x, theta }
    }

    pub fn identity() -> Self {
        HwElement { p: T::zero(), x: T::zero(), theta: T::zero() }
    }
}

/// Heisenberg-Weyl composition `w2 ∘ w1` (left argument primed):
/// `θ″ = θ + θ′ + ½γ(p x′ − x p′)` with `p″ = p + p′`, `x″ = x + x′`.
/// `γ = 0` degenerates to componentwise addition.
pub fn hw_compose<T: Real>(gamma: T, w2: &HwElement<T>, w1: &HwElement<T>) -> HwElement<T> {
    HwElement {
        p: w2.p + w1.p,
        x: w2.x + w1.x,
        theta: w2.theta + w1.theta + T::half() * gamma * (w1.p * w2.x - w1.x * w2.p),
    }
}
