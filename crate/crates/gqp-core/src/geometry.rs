//! Invariant vector fields (closed-form and numeric), structure constants,
//! the connection form Θ, characteristic flows with their Noether charges,
//! Lagrangians, and the oscillator's orthogonal phase-space coordinates.
//!
//! Basis order is fixed module-wide as `(t, p, x, Ξ)`; the fiber component
//! of every numeric derivative is taken on `ln ζ` to linearize the
//! multiplicative fiber.

use crate::error::{Error, Result};
use crate::group::{compose, GroupElement, ModelKind, ModelParams, Sl2Matrix};

/// Coordinate index for the invariant fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldIndex {
    T,
    P,
    X,
    Zeta,
}

impl FieldIndex {
    pub const BASE: [FieldIndex; 3] = [FieldIndex::T, FieldIndex::P, FieldIndex::X];
    pub const ALL: [FieldIndex; 4] =
        [FieldIndex::T, FieldIndex::P, FieldIndex::X, FieldIndex::Zeta];
}

/// Tangent vector in the `(∂t, ∂p, ∂x, Ξ)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub dt: f64,
    pub dp: f64,
    pub dx: f64,
    pub dxi: f64,
}

impl TangentVector {
    pub const ZERO: TangentVector = TangentVector { dt: 0.0, dp: 0.0, dx: 0.0, dxi: 0.0 };

    pub fn new(dt: f64, dp: f64, dx: f64, dxi: f64) -> Self {
        TangentVector { dt, dp, dx, dxi }
    }

    pub fn scale(&self, s: f64) -> Self {
        TangentVector { dt: s * self.dt, dp: s * self.dp, dx: s * self.dx, dxi: s * self.dxi }
    }

    pub fn add(&self, o: &Self) -> Self {
        TangentVector {
            dt: self.dt + o.dt,
            dp: self.dp + o.dp,
            dx: self.dx + o.dx,
            dxi: self.dxi + o.dxi,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.dt.abs().max(self.dp.abs()).max(self.dx.abs()).max(self.dxi.abs())
    }
}

/// Covector in the `(dt, dp, dx, dΞ)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covector {
    pub ct: f64,
    pub cp: f64,
    pub cx: f64,
    pub cxi: f64,
}

impl Covector {
    pub fn pair(&self, v: &TangentVector) -> f64 {
        self.ct * v.dt + self.cp * v.dp + self.cx * v.dx + self.cxi * v.dxi
    }
}

fn energy(p: f64, params: &ModelParams) -> f64 {
    0.5 * params.sigma * params.sigma * p * p + params.mu * p
}

/// Oscillator energy `E(p, x) = ½ω(λ⁻²p² ∓ λ²x²)` (− harmonic, + repulsive).
fn oscillator_energy(model: ModelKind, p: f64, x: f64, params: &ModelParams) -> f64 {
    let l2 = params.omega / (params.sigma * params.sigma);
    let kinetic = p * p / l2;
    let potential = l2 * x * x;
    match model {
        ModelKind::Harmonic => 0.5 * params.omega * (kinetic - potential),
        ModelKind::Repulsive => 0.5 * params.omega * (kinetic + potential),
        _ => unreachable!("oscillator energy for oscillator models only"),
    }
}

/// Closed-form left-invariant vector field at `point`.
///
/// For Black-Scholes the time field carries the discount shift
/// `X_t^L ↦ X_t^L − rΞ`, matching the tilde-operators that produce the
/// pricing equation.
pub fn livf_closed(
    model: ModelKind,
    index: FieldIndex,
    point: &GroupElement,
    params: &ModelParams,
) -> Result<TangentVector> {
    params.validate(model)?;
    point.validate()?;
    let (p, x) = (point.p, point.x);
    Ok(match index {
        FieldIndex::Zeta => TangentVector::new(0.0, 0.0, 0.0, 1.0),
        FieldIndex::T => match model {
            ModelKind::BlackScholes => TangentVector::new(
                1.0,
                0.0,
                params.sigma * params.sigma * p,
                energy(p, params) - params.r,
            ),
            ModelKind::HoLee => TangentVector::new(
                1.0,
                0.0,
                params.sigma * params.sigma * p,
                energy(p, params) + params.beta * x,
            ),
            ModelKind::Harmonic => {
                let l2 = params.omega / (params.sigma * params.sigma);
                TangentVector::new(1.0, params.omega * l2 * x, params.omega * p / l2, 0.0)
            }
            ModelKind::Repulsive => {
                let l2 = params.omega / (params.sigma * params.sigma);
                TangentVector::new(1.0, -params.omega * l2 * x, params.omega * p / l2, 0.0)
            }
        },
        FieldIndex::P => match model {
            ModelKind::BlackScholes | ModelKind::HoLee => TangentVector::new(0.0, 1.0, 0.0, x),
            ModelKind::Harmonic | ModelKind::Repulsive => {
                TangentVector::new(0.0, 1.0, 0.0, 0.5 * x)
            }
        },
        FieldIndex::X => match model {
            ModelKind::BlackScholes | ModelKind::HoLee => TangentVector::new(0.0, 0.0, 1.0, 0.0),
            ModelKind::Harmonic | ModelKind::Repulsive => {
                TangentVector::new(0.0, 0.0, 1.0, -0.5 * p)
            }
        },
    })
}

fn validate_step(h: f64) -> Result<()> {
    if !(1e-7..=1e-4).contains(&h) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step {h} outside [1e-7, 1e-4]"
        )));
    }
    Ok(())
}

fn perturbed_identity(index: FieldIndex, eps: f64) -> GroupElement {
    let mut d = GroupElement::identity();
    match index {
        FieldIndex::T => d.t = eps,
        FieldIndex::P => d.p = eps,
        FieldIndex::X => d.x = eps,
        FieldIndex::Zeta => d.zeta = eps.exp(),
    }
    d
}

fn translation_derivative(
    model: ModelKind,
    index: FieldIndex,
    point: &GroupElement,
    params: &ModelParams,
    h: f64,
    left_translate: bool,
) -> Result<TangentVector> {
    let eval = |eps: f64| -> Result<(f64, f64, f64, f64)> {
        let d = perturbed_identity(index, eps);
        let g = if left_translate {
            compose(model, point, &d, params)?
        } else {
            compose(model, &d, point, params)?
        };
        Ok((g.t, g.p, g.x, g.ln_zeta()))
    };
    let plus = eval(h)?;
    let minus = eval(-h)?;
    let inv = 0.5 / h;
    Ok(TangentVector::new(
        (plus.0 - minus.0) * inv,
        (plus.1 - minus.1) * inv,
        (plus.2 - minus.2) * inv,
        (plus.3 - minus.3) * inv,
    ))
}

/// Left-invariant field by central differencing `compose(point, δ)` in δ's
/// `index` coordinate at the identity. Carries the same Black-Scholes
/// discount shift as `livf_closed` so the two agree.
pub fn livf_numeric(
    model: ModelKind,
    index: FieldIndex,
    point: &GroupElement,
    params: &ModelParams,
    h: f64,
) -> Result<TangentVector> {
    params.validate(model)?;
    validate_step(h)?;
    let mut v = translation_derivative(model, index, point, params, h, true)?;
    if model == ModelKind::BlackScholes && index == FieldIndex::T {
        v.dxi -= params.r;
    }
    Ok(v)
}

/// Right-invariant field by central differencing `compose(δ, point)`.
pub fn rivf_numeric(
    model: ModelKind,
    index: FieldIndex,
    point: &GroupElement,
    params: &ModelParams,
    h: f64,
) -> Result<TangentVector> {
    params.validate(model)?;
    validate_step(h)?;
    translation_derivative(model, index, point, params, h, false)
}

const BRACKET_FIELD_STEP: f64 = 1e-5;
const BRACKET_NESTED_STEP: f64 = 1e-4;

fn field_at(
    model: ModelKind,
    index: FieldIndex,
    left: bool,
    t: f64,
    p: f64,
    x: f64,
    params: &ModelParams,
) -> Result<TangentVector> {
    let point = GroupElement { t, p, x, zeta: 1.0 };
    if left {
        livf_numeric(model, index, &point, params, BRACKET_FIELD_STEP)
    } else {
        rivf_numeric(model, index, &point, params, BRACKET_FIELD_STEP)
    }
}

fn bracket_of(
    model: ModelKind,
    i: (FieldIndex, bool),
    j: (FieldIndex, bool),
    point: &GroupElement,
    params: &ModelParams,
) -> Result<TangentVector> {
    let h = BRACKET_NESTED_STEP;
    let (t, p, x) = (point.t, point.p, point.x);
    let xi = field_at(model, i.0, i.1, t, p, x, params)?;
    let xj = field_at(model, j.0, j.1, t, p, x, params)?;
    // Directional derivative of every component of `g` along the base part
    // of `v`, by central differences.
    let advect = |v: &TangentVector, which: (FieldIndex, bool)| -> Result<TangentVector> {
        let mut out = TangentVector::ZERO;
        for (coord, weight) in [(FieldIndex::T, v.dt), (FieldIndex::P, v.dp), (FieldIndex::X, v.dx)]
        {
            if weight == 0.0 {
                continue;
            }
            let (mut tp, mut pp, mut xp) = (t, p, x);
            let (mut tm, mut pm, mut xm) = (t, p, x);
            match coord {
                FieldIndex::T => {
                    tp += h;
                    tm -= h;
                }
                FieldIndex::P => {
                    pp += h;
                    pm -= h;
                }
                FieldIndex::X => {
                    xp += h;
                    xm -= h;
                }
                FieldIndex::Zeta => unreachable!(),
            }
            let plus = field_at(model, which.0, which.1, tp, pp, xp, params)?;
            let minus = field_at(model, which.0, which.1, tm, pm, xm, params)?;
            out = out.add(&plus.sub(&minus).scale(weight * 0.5 / h));
        }
        Ok(out)
    };
    let di_of_j = advect(&xi, j)?;
    let dj_of_i = advect(&xj, i)?;
    Ok(di_of_j.sub(&dj_of_i))
}

/// Lie bracket `[X_i^L, X_j^L]` at `point`, from the numeric fields, with
/// second-order nested differences. The Ξ component follows
/// `[X + fΞ, Y + gΞ] = [X, Y] + (X(g) − Y(f))Ξ` (Ξ is central).
pub fn commutator_numeric(
    model: ModelKind,
    i: FieldIndex,
    j: FieldIndex,
    point: &GroupElement,
    params: &ModelParams,
) -> Result<TangentVector> {
    bracket_of(model, (i, true), (j, true), point, params)
}

/// Bracket `[X_i^R, X_j^R]` of the numeric right-invariant fields.
pub fn commutator_numeric_right(
    model: ModelKind,
    i: FieldIndex,
    j: FieldIndex,
    point: &GroupElement,
    params: &ModelParams,
) -> Result<TangentVector> {
    bracket_of(model, (i, false), (j, false), point, params)
}

/// Closed-form bracket `[X_i^L, X_j^L]` at `point`, expanded through the
/// structure constants (the Ξ direction is central, so any bracket with it
/// vanishes).
pub fn livf_bracket_closed(
    model: ModelKind,
    i: FieldIndex,
    j: FieldIndex,
    point: &GroupElement,
    params: &ModelParams,
) -> Result<TangentVector> {
    use FieldIndex::{P, T, X, Zeta};
    params.validate(model)?;
    if i == j || i == Zeta || j == Zeta {
        return Ok(TangentVector::ZERO);
    }
    // Canonical order (T, P), (T, X), (P, X); antisymmetry for the rest.
    let (a, b, sign) = match (i, j) {
        (T, P) | (T, X) | (P, X) => (i, j, 1.0),
        _ => (j, i, -1.0),
    };
    let field = |idx| livf_closed(model, idx, point, params);
    let xi = TangentVector::new(0.0, 0.0, 0.0, 1.0);
    let s2 = params.sigma * params.sigma;
    let bracket = match (model, a, b) {
        (ModelKind::BlackScholes | ModelKind::HoLee, T, P) => {
            field(X)?.scale(-s2).add(&xi.scale(-params.mu))
        }
        (ModelKind::BlackScholes, T, X) => TangentVector::ZERO,
        (ModelKind::HoLee, T, X) => xi.scale(-params.beta),
        // ωλ⁻² = σ² and ωλ² = ω²/σ² since λ² = ω/σ².
        (ModelKind::Harmonic | ModelKind::Repulsive, T, P) => field(X)?.scale(-s2),
        (ModelKind::Harmonic, T, X) => field(P)?.scale(-params.omega * params.omega / s2),
        (ModelKind::Repulsive, T, X) => field(P)?.scale(params.omega * params.omega / s2),
        (_, P, X) => xi.scale(-1.0),
        _ => unreachable!("canonical pairs are exhaustive"),
    };
    Ok(bracket.scale(sign))
}

/// Mixed bracket `[X_i^R, X_j^L]`; vanishes identically on a Lie group.
pub fn mixed_bracket_numeric(
    model: ModelKind,
    i: FieldIndex,
    j: FieldIndex,
    point: &GroupElement,
    params: &ModelParams,
) -> Result<TangentVector> {
    bracket_of(model, (i, false), (j, true), point, params)
}

/// Connection form Θ at `point`: annihilates every left-invariant field and
/// pairs to one with the fiber generator Ξ.
pub fn connection_theta(
    model: ModelKind,
    point: &GroupElement,
    params: &ModelParams,
) -> Result<Covector> {
    params.validate(model)?;
    point.validate()?;
    let (p, x) = (point.p, point.x);
    Ok(match model {
        ModelKind::BlackScholes => Covector {
            ct: -(energy(p, params) - params.r),
            cp: -x,
            cx: 0.0,
            cxi: 1.0,
        },
        ModelKind::HoLee => Covector {
            ct: -(energy(p, params) + params.beta * x),
            cp: -x,
            cx: 0.0,
            cxi: 1.0,
        },
        ModelKind::Harmonic | ModelKind::Repulsive => Covector {
            ct: -oscillator_energy(model, p, x, params),
            cp: -0.5 * x,
            cx: 0.5 * p,
            cxi: 1.0,
        },
    })
}

/// The characteristic field X_C whose flow carries solutions of the model
/// PDE: time translation plus, for Ho-Lee, the `−β ∂p` drift that makes the
/// field lie in the kernel of dΘ.
pub fn characteristic_field(
    model: ModelKind,
    point: &GroupElement,
    params: &ModelParams,
) -> Result<TangentVector> {
    params.validate(model)?;
    let p = point.p;
    let s2 = params.sigma * params.sigma;
    Ok(match model {
        ModelKind::BlackScholes => {
            TangentVector::new(1.0, 0.0, s2 * p + params.mu, energy(p, params) - params.r)
        }
        ModelKind::HoLee => {
            TangentVector::new(1.0, -params.beta, s2 * p + params.mu, energy(p, params))
        }
        ModelKind::Harmonic | ModelKind::Repulsive => {
            livf_closed(model, FieldIndex::T, point, params)?
        }
    })
}

/// Max-norm of the contraction `i_{X_C} dΘ` over the base components,
/// with dΘ built from central differences of the Θ coefficients. Zero
/// (to stencil accuracy) exactly because X_C spans the characteristic
/// module of dΘ.
pub fn curvature_contraction_residual(
    model: ModelKind,
    point: &GroupElement,
    params: &ModelParams,
) -> Result<f64> {
    let h = BRACKET_FIELD_STEP;
    let xc = characteristic_field(model, point, params)?;
    let theta_at = |t: f64, p: f64, x: f64| -> Result<[f64; 3]> {
        let q = GroupElement { t, p, x, zeta: 1.0 };
        let th = connection_theta(model, &q, params)?;
        Ok([th.ct, th.cp, th.cx])
    };
    let (t, p, x) = (point.t, point.p, point.x);
    // d_coeffs[i][j] = ∂_i c_j, i over (t,p,x).
    let mut d_coeffs = [[0.0; 3]; 3];
    for i in 0..3 {
        let mut fwd = (t, p, x);
        let mut bwd = (t, p, x);
        match i {
            0 => {
                fwd.0 += h;
                bwd.0 -= h;
            }
            1 => {
                fwd.1 += h;
                bwd.1 -= h;
            }
            _ => {
                fwd.2 += h;
                bwd.2 -= h;
            }
        }
        let cp = theta_at(fwd.0, fwd.1, fwd.2)?;
        let cm = theta_at(bwd.0, bwd.1, bwd.2)?;
        for j in 0..3 {
            d_coeffs[i][j] = (cp[j] - cm[j]) * 0.5 / h;
        }
    }
    let comp = [xc.dt, xc.dp, xc.dx];
    let mut worst = 0.0_f64;
    for j in 0..3 {
        let mut acc = 0.0;
        for i in 0..3 {
            acc += comp[i] * (d_coeffs[i][j] - d_coeffs[j][i]);
        }
        worst = worst.max(acc.abs());
    }
    Ok(worst)
}

/// Conserved quantities along the characteristic flow, one triple per model.
/// The affine models use the standard drift-adjusted momentum and position
/// charges; the oscillator triples (energy plus the two exponentially or
/// rotationally compensated orthogonal coordinates) are verified by flow.
pub fn noether_charges(
    model: ModelKind,
    t: f64,
    p: f64,
    x: f64,
    params: &ModelParams,
) -> [f64; 3] {
    let s2 = params.sigma * params.sigma;
    match model {
        ModelKind::BlackScholes => [
            p,
            energy(p, params) - params.r,
            x - (s2 * p + params.mu) * t,
        ],
        ModelKind::HoLee => [
            p + params.beta * t,
            energy(p, params) + params.beta * x,
            s2 * t * p + params.mu * t + 0.5 * params.beta * s2 * t * t - x,
        ],
        ModelKind::Harmonic => {
            let lambda = params.lambda();
            let (a, b) = ortho(p, x, lambda);
            [
                oscillator_energy(model, p, x, params),
                a * (params.omega * t).exp(),
                b * (-params.omega * t).exp(),
            ]
        }
        ModelKind::Repulsive => {
            let lambda = params.lambda();
            let (pt, xt) = (p / lambda, lambda * x);
            let (c, s) = ((params.omega * t).cos(), (params.omega * t).sin());
            [oscillator_energy(model, p, x, params), pt * c + xt * s, xt * c - pt * s]
        }
    }
}

/// One sample along a characteristic flow.
#[derive(Debug, Clone, Copy)]
pub struct FlowState {
    pub t: f64,
    pub p: f64,
    pub x: f64,
    pub charges: [f64; 3],
}

/// Fixed-step RK4 integration of the characteristic field from `(p, x)` at
/// `t = 0`; returns `steps + 1` states including the initial one.
pub fn characteristic_flow(
    model: ModelKind,
    initial: (f64, f64),
    duration: f64,
    params: &ModelParams,
    steps: usize,
) -> Result<Vec<FlowState>> {
    params.validate(model)?;
    if steps < 10 {
        return Err(Error::InvalidParameter(format!(
            "characteristic flow needs at least 10 steps, got {steps}"
        )));
    }
    if !duration.is_finite() {
        return Err(Error::InvalidParameter("flow duration must be finite".into()));
    }
    let rhs = |p: f64, x: f64| -> (f64, f64) {
        let s2 = params.sigma * params.sigma;
        let l2 = params.omega / (params.sigma * params.sigma);
        match model {
            ModelKind::BlackScholes => (0.0, s2 * p + params.mu),
            ModelKind::HoLee => (-params.beta, s2 * p + params.mu),
            ModelKind::Harmonic => (params.omega * l2 * x, params.omega * p / l2),
            ModelKind::Repulsive => (-params.omega * l2 * x, params.omega * p / l2),
        }
    };
    let h = duration / steps as f64;
    let (mut p, mut x) = initial;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(FlowState { t: 0.0, p, x, charges: noether_charges(model, 0.0, p, x, params) });
    for k in 0..steps {
        let (k1p, k1x) = rhs(p, x);
        let (k2p, k2x) = rhs(p + 0.5 * h * k1p, x + 0.5 * h * k1x);
        let (k3p, k3x) = rhs(p + 0.5 * h * k2p, x + 0.5 * h * k2x);
        let (k4p, k4x) = rhs(p + h * k3p, x + h * k3x);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        let t = (k + 1) as f64 * h;
        out.push(FlowState { t, p, x, charges: noether_charges(model, t, p, x, params) });
    }
    Ok(out)
}

/// Model Lagrangian in position/velocity form. Ho-Lee has none.
pub fn lagrangian(model: ModelKind, x: f64, xdot: f64, params: &ModelParams) -> Result<f64> {
    params.validate(model)?;
    let s2 = params.sigma * params.sigma;
    match model {
        ModelKind::BlackScholes => {
            let v = xdot - params.mu;
            Ok(v * v / (2.0 * s2) - params.r)
        }
        ModelKind::HoLee => Err(Error::NotDefined(
            "the Ho-Lee model has no position-space Lagrangian in this framework".into(),
        )),
        ModelKind::Harmonic => {
            Ok((xdot * xdot + 0.5 * params.omega * params.omega * x * x) / (2.0 * s2))
        }
        ModelKind::Repulsive => {
            Ok((xdot * xdot - 0.5 * params.omega * params.omega * x * x) / (2.0 * s2))
        }
    }
}

fn ortho(p: f64, x: f64, lambda: f64) -> (f64, f64) {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    ((p / lambda - lambda * x) * inv_sqrt2, (p / lambda + lambda * x) * inv_sqrt2)
}

/// Orthogonal phase-space coordinates
/// `A = (p/λ − λx)/√2`, `B = (p/λ + λx)/√2`.
pub fn orthogonal_coords(p: f64, x: f64, lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(ortho(p, x, lambda))
}

/// Inverse of [`orthogonal_coords`].
pub fn orthogonal_coords_inverse(a: f64, b: f64, lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    Ok((lambda * (a + b) * inv_sqrt2, (b - a) * inv_sqrt2 / lambda))
}

/// Unit-determinant matrix whose similarity transform diagonalizes the
/// harmonic generator: `R⁻¹ M_H(t) R = diag(e^{ωt}, e^{−ωt})`.
pub fn diagonalizing_matrix(lambda: f64) -> Result<Sl2Matrix> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Sl2Matrix::new(s / lambda, -s / lambda, s * lambda, s * lambda)
}
