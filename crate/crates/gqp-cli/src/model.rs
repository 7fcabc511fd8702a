//! Model selection, parameter resolution, and payoff construction shared
//! by the pricing, kernel, transform, and Monte Carlo commands.

use clap::{Args, ValueEnum};
use gqp_core::kernels::KernelKind;
use gqp_core::{ModelKind, ModelParams};

use crate::config::{need, pick, FileConfig};
use crate::failure::{validation, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    Bs,
    Holee,
    Harmonic,
    Repulsive,
}

impl ModelChoice {
    pub fn parse(name: &str) -> Result<Self, Failure> {
        match name {
            "bs" => Ok(ModelChoice::Bs),
            "holee" => Ok(ModelChoice::Holee),
            "harmonic" => Ok(ModelChoice::Harmonic),
            "repulsive" => Ok(ModelChoice::Repulsive),
            other => Err(validation(format!(
                "unknown model '{other}' (expected bs, holee, harmonic, or repulsive)"
            ))),
        }
    }

    pub fn kind(self) -> ModelKind {
        match self {
            ModelChoice::Bs => ModelKind::BlackScholes,
            ModelChoice::Holee => ModelKind::HoLee,
            ModelChoice::Harmonic => ModelKind::Harmonic,
            ModelChoice::Repulsive => ModelKind::Repulsive,
        }
    }

    pub fn kernel_kind(self) -> KernelKind {
        match self {
            ModelChoice::Bs => KernelKind::Bs,
            ModelChoice::Holee => KernelKind::HoLee,
            ModelChoice::Harmonic => KernelKind::Mehler,
            ModelChoice::Repulsive => KernelKind::RepulsiveTrig,
        }
    }
}

/// Flag, else config `model` key, else an error.
pub fn resolve_model(flag: Option<ModelChoice>, file: &FileConfig) -> Result<ModelChoice, Failure> {
    if let Some(m) = flag {
        return Ok(m);
    }
    match file.model.as_deref() {
        Some(name) => ModelChoice::parse(name),
        None => Err(validation("missing --model (set the flag or a config key)")),
    }
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct ParamFlags {
    /// Volatility sigma (> 0)
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Short rate used for discounting (Black-Scholes)
    #[arg(long)]
    pub r: Option<f64>,
    /// Drift mu
    #[arg(long)]
    pub mu: Option<f64>,
    /// Drift susceptibility beta (Ho-Lee)
    #[arg(long)]
    pub beta: Option<f64>,
    /// Oscillator frequency omega (> 0)
    #[arg(long)]
    pub omega: Option<f64>,
}

/// Merge flags over config keys, apply per-model defaults, validate.
pub fn resolve_params(
    model: ModelChoice,
    flags: &ParamFlags,
    file: &FileConfig,
) -> Result<ModelParams, Failure> {
    let sigma = need("sigma", flags.sigma, file.sigma)?;
    let params = match model {
        ModelChoice::Bs => {
            let r = pick(flags.r, file.r, 0.0);
            let mu = pick(flags.mu, file.mu, 0.0);
            ModelParams::black_scholes(sigma, r, mu)
        }
        ModelChoice::Holee => {
            let mu = pick(flags.mu, file.mu, 0.0);
            let beta = pick(flags.beta, file.beta, 1.0);
            ModelParams::ho_lee(sigma, mu, beta)
        }
        ModelChoice::Harmonic => {
            let omega = need("omega", flags.omega, file.omega)?;
            ModelParams::harmonic(sigma, omega)
        }
        ModelChoice::Repulsive => {
            let omega = need("omega", flags.omega, file.omega)?;
            ModelParams::repulsive(sigma, omega)
        }
    };
    params.validate(model.kind())?;
    Ok(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PayoffKind {
    /// max(e^x - K, 0)
    Call,
    /// Constant 1 (bond / kernel mass)
    Unit,
    /// e^x
    Exp,
    /// exp(-(x - center)^2 / (2 width^2))
    Gauss,
}

impl PayoffKind {
    pub fn parse(name: &str) -> Result<Self, Failure> {
        match name {
            "call" => Ok(PayoffKind::Call),
            "unit" => Ok(PayoffKind::Unit),
            "exp" => Ok(PayoffKind::Exp),
            "gauss" => Ok(PayoffKind::Gauss),
            other => Err(validation(format!(
                "unknown payoff '{other}' (expected call, unit, exp, or gauss)"
            ))),
        }
    }
}

pub struct Payoff {
    pub kind: PayoffKind,
    pub strike: f64,
    pub center: f64,
    pub width: f64,
}

impl Payoff {
    pub fn describe(&self) -> String {
        match self.kind {
            PayoffKind::Call => format!("call(strike={})", self.strike),
            PayoffKind::Unit => "unit".to_string(),
            PayoffKind::Exp => "exp".to_string(),
            PayoffKind::Gauss => format!("gauss(center={}, width={})", self.center, self.width),
        }
    }

    pub fn closure(&self) -> Box<dyn Fn(f64) -> f64 + Sync + Send> {
        match self.kind {
            PayoffKind::Call => {
                let k = self.strike;
                Box::new(move |x: f64| (x.exp() - k).max(0.0))
            }
            PayoffKind::Unit => Box::new(|_| 1.0),
            PayoffKind::Exp => Box::new(|x: f64| x.exp()),
            PayoffKind::Gauss => {
                let (c, w) = (self.center, self.width);
                Box::new(move |x: f64| (-(x - c) * (x - c) / (2.0 * w * w)).exp())
            }
        }
    }
}

pub fn build_payoff(
    kind_flag: Option<PayoffKind>,
    strike: Option<f64>,
    center: Option<f64>,
    width: Option<f64>,
    file: &FileConfig,
    default_kind: PayoffKind,
) -> Result<Payoff, Failure> {
    let kind = match kind_flag {
        Some(k) => k,
        None => match file.payoff.as_deref() {
            Some(name) => PayoffKind::parse(name)?,
            None => default_kind,
        },
    };
    let strike = match kind {
        PayoffKind::Call => {
            let k = need("strike", strike, file.strike)?;
            if !(k > 0.0) {
                return Err(validation("strike must be positive"));
            }
            k
        }
        _ => 0.0,
    };
    let center = pick(center, file.center, 0.0);
    let width = pick(width, file.width, 1.0);
    if kind == PayoffKind::Gauss && !(width > 0.0) {
        return Err(validation("width must be positive"));
    }
    Ok(Payoff {
        kind,
        strike,
        center,
        width,
    })
}
