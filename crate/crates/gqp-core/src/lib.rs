//! Group quantization of the extended Weyl-symplectic group WSp(2,R), applied
//! to one-factor pricing models.
//!
//! The library is organized bottom-up:
//!
//! * [`group`] — the centrally extended group law for four models
//!   (Black-Scholes, Ho-Lee, harmonic and repulsive oscillator), cocycles,
//!   inverses, and the SL(2,R) base actions.
//! * [`geometry`] — left/right invariant vector fields, the vertical
//!   connection form Θ, structure constants, characteristic flows and their
//!   Noether charges, classical Lagrangians.
//! * [`special`] — Airy functions on a finite window (double-double series +
//!   asymptotics), Hermite functions, the normal CDF.
//! * [`quad`] — Gauss-Legendre and uniform trapezoid quadrature.
//! * [`transforms`] — linear canonical transforms with Gaussian kernels,
//!   Bromwich (bilateral-Laplace) inversion, Mellin transform pairs.
//! * [`kernels`] — closed-form pricing kernels, their PDE residuals,
//!   semigroup checks, payoff propagation.
//! * [`models`] — Black-Scholes call pricing by four routes, the Ho-Lee
//!   zero-coupon bond, Airy-mode and Hermite-mode solutions, numeraire
//!   (Galilean) gauge maps.
//! * [`mc`] — Feynman-Kac Monte Carlo with pathwise exponential discounting;
//!   deterministic across thread counts for a fixed seed.
//! * [`verify`] — named residual check suites used by the CLI.
//!
//! Core algebra and closed-form kernels are generic over the scalar type via
//! [`scalar::Real`] (any `num_traits::Float` with the usual extras); the
//! quadrature, transform, model and Monte Carlo layers are `f64`-only since
//! their tolerances are calibrated to double precision.

pub mod error;
pub mod scalar;

pub mod group;

pub mod geometry;
pub mod kernels;
pub mod mc;
pub mod models;
pub mod quad;
pub mod special;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use group::{GroupElement, ModelKind, ModelParams, Sl2Matrix};

/// Group element over `f64`, the working precision of the numeric layers.
pub type GroupElementF64 = GroupElement<f64>;
/// Group element over `f32` (useful for quick scans; expect ~1e-4 residuals).
pub type GroupElementF32 = GroupElement<f32>;
/// Model parameters over `f64`.
pub type ModelParamsF64 = ModelParams<f64>;
/// SL(2,R) base-action matrix over `f64`.
pub type Sl2MatrixF64 = Sl2Matrix<f64>;
