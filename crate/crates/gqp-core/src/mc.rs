//! Feynman-Kac Monte Carlo oracle: arithmetic Brownian paths with pathwise
//! exponential discounting for the four model potentials.
//!
//! Paths are generated in fixed-size chunks, each from its own
//! deterministically derived ChaCha stream, and partial results are merged
//! in chunk order — estimates are bit-identical for a fixed seed regardless
//! of how many threads run the chunks.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{ModelKind, ModelParams};

/// Paths per RNG stream; fixed so chunking never depends on thread count.
pub const PATHS_PER_CHUNK: usize = 2048;

/// Simulation request for `dX = μ dt + σ dW` from `x0` over `horizon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpec {
    pub x0: f64,
    pub mu: f64,
    pub sigma: f64,
    pub horizon: f64,
    pub steps: usize,
    pub n_paths: usize,
    pub seed: u64,
    /// Antithetic pairing (on by default in the CLI); requires even
    /// `n_paths`, and each mirrored pair contributes one observation.
    pub antithetic: bool,
}

impl PathSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 16 {
            return Err(Error::InvalidParameter(format!(
                "need at least 16 time steps, got {}",
                self.steps
            )));
        }
        if self.n_paths < 1000 {
            return Err(Error::InvalidParameter(format!(
                "need at least 1000 paths, got {}",
                self.n_paths
            )));
        }
        if self.antithetic && self.n_paths % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "antithetic pairing needs an even path count, got {}",
                self.n_paths
            )));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma must be > 0, got {}",
                self.sigma
            )));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        for (name, v) in [("x0", self.x0), ("mu", self.mu)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    fn base_paths(&self) -> usize {
        if self.antithetic {
            self.n_paths / 2
        } else {
            self.n_paths
        }
    }
}

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: usize,
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Uniform on (0, 1] — safe under `ln`.
fn uniform_open(rng: &mut ChaCha12Rng) -> f64 {
    (((rng.next_u64() >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
}

/// Box-Muller; an unused trailing partner is discarded so the draw count
/// per path is a function of `steps` alone.
fn fill_normals(rng: &mut ChaCha12Rng, out: &mut [f64]) {
    let mut i = 0;
    while i < out.len() {
        let u1 = uniform_open(rng);
        let u2 = uniform_open(rng);
        let radius = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        out[i] = radius * theta.cos();
        i += 1;
        if i < out.len() {
            out[i] = radius * theta.sin();
            i += 1;
        }
    }
}

fn build_path(path: &mut [f64], normals: &[f64], spec: &PathSpec, sign: f64) {
    let dt = spec.horizon / spec.steps as f64;
    let vol = spec.sigma * dt.sqrt();
    path[0] = spec.x0;
    for (i, &z) in normals.iter().enumerate() {
        path[i + 1] = path[i] + spec.mu * dt + sign * vol * z;
    }
}

/// Single-pass mean/variance accumulator with an order-fixed merge.
#[derive(Debug, Clone, Copy)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    const EMPTY: Welford = Welford { n: 0, mean: 0.0, m2: 0.0 };

    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Welford) -> Welford {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 =
            self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Welford { n, mean, m2 }
    }

    fn std_error(&self) -> f64 {
        (self.m2 / (self.n as f64 - 1.0) / self.n as f64).sqrt()
    }
}

/// Sample standard deviation over √n, accumulated in one stable pass.
pub fn standard_error(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "standard error needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let mut w = Welford::EMPTY;
    for &s in samples {
        w.push(s);
    }
    Ok(w.std_error())
}

/// Generate the full path ensemble (antithetic mirrors adjacent to their
/// base paths). Exact Gaussian increments — the state has no discretization
/// bias. Memory is `n_paths × (steps + 1)` doubles; prefer [`fk_price`] for
/// large runs, which streams over the same paths.
pub fn simulate_paths(spec: &PathSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let n_base = spec.base_paths();
    let mut out = Vec::with_capacity(spec.n_paths);
    let mut normals = vec![0.0; spec.steps];
    for chunk in 0..n_base.div_ceil(PATHS_PER_CHUNK) {
        let mut rng = chunk_rng(spec.seed, chunk as u64);
        let lo = chunk * PATHS_PER_CHUNK;
        let hi = (lo + PATHS_PER_CHUNK).min(n_base);
        for _ in lo..hi {
            fill_normals(&mut rng, &mut normals);
            let mut path = vec![0.0; spec.steps + 1];
            build_path(&mut path, &normals, spec, 1.0);
            out.push(path);
            if spec.antithetic {
                let mut mirror = vec![0.0; spec.steps + 1];
                build_path(&mut mirror, &normals, spec, -1.0);
                out.push(mirror);
            }
        }
    }
    Ok(out)
}

/// Pathwise trapezoid of `f(X_s)` along a stored path.
fn path_integral(path: &[f64], dt: f64, f: impl Fn(f64) -> f64) -> f64 {
    let n = path.len();
    let mut acc = 0.5 * (f(path[0]) + f(path[n - 1]));
    for &x in &path[1..n - 1] {
        acc += f(x);
    }
    acc * dt
}

fn discounted_payoff(
    model: ModelKind,
    payoff: &(dyn Fn(f64) -> f64 + Sync),
    path: &[f64],
    spec: &PathSpec,
    params: &ModelParams,
) -> f64 {
    let dt = spec.horizon / spec.steps as f64;
    let discount = match model {
        ModelKind::BlackScholes => (-params.r * spec.horizon).exp(),
        ModelKind::HoLee => (-params.beta * path_integral(path, dt, |x| x)).exp(),
        ModelKind::Harmonic => {
            (-0.5 * params.gamma() * path_integral(path, dt, |x| x * x)).exp()
        }
        ModelKind::Repulsive => {
            (0.5 * params.gamma() * path_integral(path, dt, |x| x * x)).exp()
        }
    };
    discount * payoff(path[path.len() - 1])
}

/// Feynman-Kac estimate of the model expectation
/// `E[ discount(X) · payoff(X_τ) ]` with the model's pathwise discount:
/// `e^{−rτ}` (Black-Scholes), `e^{−β∫X ds}` (Ho-Lee), `e^{∓½γ∫X² ds}`
/// (harmonic/repulsive, γ = ω²/σ²).
///
/// A standard error above 10% of the estimate is reported as
/// [`Error::VarianceBlowUp`] carrying both numbers rather than returned as
/// if trustworthy.
pub fn fk_price(
    model: ModelKind,
    payoff: &(dyn Fn(f64) -> f64 + Sync),
    spec: &PathSpec,
    params: &ModelParams,
) -> Result<McResult> {
    spec.validate()?;
    params.validate(model)?;
    if spec.mu != params.mu || spec.sigma != params.sigma {
        return Err(Error::InvalidParameter(format!(
            "path dynamics (mu = {}, sigma = {}) must match the model's (mu = {}, sigma = {})",
            spec.mu, spec.sigma, params.mu, params.sigma
        )));
    }
    if model == ModelKind::Repulsive && params.omega * spec.horizon > 1.0 {
        return Err(Error::Domain(format!(
            "repulsive discounting is variance-controlled only for omega*tau <= 1, got {}",
            params.omega * spec.horizon
        )));
    }
    let n_base = spec.base_paths();
    let n_chunks = n_base.div_ceil(PATHS_PER_CHUNK);
    let partials: Vec<Welford> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(spec.seed, chunk as u64);
            let lo = chunk * PATHS_PER_CHUNK;
            let hi = (lo + PATHS_PER_CHUNK).min(n_base);
            let mut normals = vec![0.0; spec.steps];
            let mut path = vec![0.0; spec.steps + 1];
            let mut w = Welford::EMPTY;
            for _ in lo..hi {
                fill_normals(&mut rng, &mut normals);
                build_path(&mut path, &normals, spec, 1.0);
                let first = discounted_payoff(model, payoff, &path, spec, params);
                let obs = if spec.antithetic {
                    build_path(&mut path, &normals, spec, -1.0);
                    0.5 * (first + discounted_payoff(model, payoff, &path, spec, params))
                } else {
                    first
                };
                w.push(obs);
            }
            w
        })
        .collect();
    let total = partials.into_iter().fold(Welford::EMPTY, Welford::merge);
    let estimate = total.mean;
    let std_error = total.std_error();
    if !(std_error <= 0.1 * estimate.abs()) {
        return Err(Error::VarianceBlowUp { estimate, std_error });
    }
    Ok(McResult { estimate, std_error, n_paths: spec.n_paths })
}
