//! `price` subcommands: Black-Scholes calls by up to four routes, the
//! Ho-Lee zero-coupon bond, and payoff propagation under any model kernel.

use clap::{Args, ValueEnum};
use gqp_core::kernels::propagate;
use gqp_core::mc::{fk_price, PathSpec};
use gqp_core::models::{
    bs_call_closed, bs_call_kernel, bs_call_mellin, holee_bond, martingale_mu, mellin_defaults,
    CallSpec,
};
use gqp_core::transforms::QuadratureSpec;
use gqp_core::ModelParams;

use crate::config::{need, pick};
use crate::failure::{validation, Failure};
use crate::model::{build_payoff, resolve_model, resolve_params, ModelChoice, ParamFlags, PayoffKind};
use crate::render::{machine, print_table, resolve_output, sig6, OutputMode};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteChoice {
    Closed,
    Mellin,
    Kernel,
    Mc,
}

impl RouteChoice {
    fn name(self) -> &'static str {
        match self {
            RouteChoice::Closed => "closed",
            RouteChoice::Mellin => "mellin",
            RouteChoice::Kernel => "kernel",
            RouteChoice::Mc => "mc",
        }
    }

    fn parse(name: &str) -> Result<Self, Failure> {
        match name {
            "closed" => Ok(RouteChoice::Closed),
            "mellin" => Ok(RouteChoice::Mellin),
            "kernel" => Ok(RouteChoice::Kernel),
            "mc" => Ok(RouteChoice::Mc),
            other => Err(validation(format!(
                "unknown route '{other}' (expected closed, mellin, kernel, or mc)"
            ))),
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BsCallArgs {
    /// Spot price (> 0)
    #[arg(long)]
    spot: Option<f64>,
    /// Strike (> 0)
    #[arg(long)]
    strike: Option<f64>,
    /// Time to expiry (> 0)
    #[arg(long)]
    tau: Option<f64>,
    /// Volatility (> 0)
    #[arg(long)]
    sigma: Option<f64>,
    /// Risk-free rate
    #[arg(long)]
    r: Option<f64>,
    /// Pricing routes, comma separated
    #[arg(long, value_delimiter = ',')]
    routes: Vec<RouteChoice>,
    /// Kernel-route quadrature nodes
    #[arg(long)]
    nodes: Option<usize>,
    /// Monte Carlo time steps
    #[arg(long)]
    steps: Option<usize>,
    /// Monte Carlo paths
    #[arg(long)]
    n_paths: Option<usize>,
}

struct RouteValue {
    route: RouteChoice,
    value: f64,
    std_error: Option<f64>,
}

pub fn run_bs_call(args: &BsCallArgs, ctx: &Ctx) -> Result<(), Failure> {
    let mode = resolve_output(ctx.output, ctx.file.output.as_deref(), OutputMode::Table)?;
    let spot = need("spot", args.spot, ctx.file.spot)?;
    let strike = need("strike", args.strike, ctx.file.strike)?;
    let tau = need("tau", args.tau, ctx.file.tau)?;
    let sigma = need("sigma", args.sigma, ctx.file.sigma)?;
    let r = pick(args.r, ctx.file.r, 0.0);
    let spec = CallSpec::new(spot, strike, tau, sigma, r)?;

    let routes: Vec<RouteChoice> = if !args.routes.is_empty() {
        args.routes.clone()
    } else if let Some(names) = ctx.file.routes.as_deref() {
        names.split(',').map(|s| RouteChoice::parse(s.trim())).collect::<Result<_, _>>()?
    } else {
        vec![RouteChoice::Closed]
    };

    let mut seed_used = None;
    let mut results = Vec::with_capacity(routes.len());
    for &route in &routes {
        let rv = match route {
            RouteChoice::Closed => RouteValue {
                route,
                value: bs_call_closed(&spec)?,
                std_error: None,
            },
            RouteChoice::Kernel => RouteValue {
                route,
                value: bs_call_kernel(&spec, pick(args.nodes, ctx.file.nodes, 512))?,
                std_error: None,
            },
            RouteChoice::Mellin => {
                let (c_default, q_default) = mellin_defaults(&spec);
                let c = pick(None, ctx.file.c, c_default);
                let q = QuadratureSpec::bromwich(
                    c,
                    pick(None, ctx.file.half_width, q_default.half_width),
                    pick(args.nodes, ctx.file.nodes, q_default.nodes),
                );
                RouteValue { route, value: bs_call_mellin(&spec, c, &q)?, std_error: None }
            }
            RouteChoice::Mc => {
                let seed = *seed_used.get_or_insert_with(|| ctx.seed());
                let mu = martingale_mu(r, sigma);
                let params = ModelParams::black_scholes(sigma, r, mu);
                let path_spec = PathSpec {
                    x0: spot.ln(),
                    mu,
                    sigma,
                    horizon: tau,
                    steps: pick(args.steps, ctx.file.steps, 200),
                    n_paths: pick(args.n_paths, ctx.file.n_paths, 100_000),
                    seed,
                    antithetic: pick(None, ctx.file.antithetic, true),
                };
                let payoff = move |x: f64| (x.exp() - strike).max(0.0);
                let est = fk_price(gqp_core::ModelKind::BlackScholes, &payoff, &path_spec, &params)?;
                RouteValue { route, value: est.estimate, std_error: Some(est.std_error) }
            }
        };
        results.push(rv);
    }

    let spread = relative_spread(&results);
    match mode {
        OutputMode::Table => {
            println!(
                "bs-call  spot={} strike={} tau={} sigma={} r={}",
                sig6(spot),
                sig6(strike),
                sig6(tau),
                sig6(sigma),
                sig6(r)
            );
            if let Some(seed) = seed_used {
                println!("seed  {seed}");
            }
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|rv| {
                    vec![
                        rv.route.name().to_string(),
                        sig6(rv.value),
                        rv.std_error.map(sig6).unwrap_or_default(),
                    ]
                })
                .collect();
            print_table(&["route", "value", "std_error"], &rows);
            if let Some(s) = spread {
                println!("max relative spread  {}", sig6(s));
            }
        }
        OutputMode::Csv => {
            println!("route,value,std_error");
            for rv in &results {
                println!(
                    "{},{},{}",
                    rv.route.name(),
                    machine(rv.value),
                    rv.std_error.map(machine).unwrap_or_default()
                );
            }
            if let Some(s) = spread {
                println!("spread,{},", machine(s));
            }
        }
        OutputMode::Json => {
            for rv in &results {
                let mut obj = serde_json::Map::new();
                obj.insert("instrument".into(), "bs-call".into());
                obj.insert("route".into(), rv.route.name().into());
                obj.insert("value".into(), rv.value.into());
                if let Some(se) = rv.std_error {
                    obj.insert("std_error".into(), se.into());
                }
                if rv.route == RouteChoice::Mc {
                    if let Some(seed) = seed_used {
                        obj.insert("seed".into(), seed.into());
                    }
                }
                println!("{}", serde_json::Value::Object(obj));
            }
            if let Some(s) = spread {
                println!(
                    "{}",
                    serde_json::json!({"instrument": "bs-call", "route": "spread", "value": s})
                );
            }
        }
    }
    Ok(())
}

/// `(max − min) / reference`, reference being the closed-form value when
/// present and the mean otherwise. `None` with fewer than two routes.
fn relative_spread(results: &[RouteValue]) -> Option<f64> {
    if results.len() < 2 {
        return None;
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for rv in results {
        lo = lo.min(rv.value);
        hi = hi.max(rv.value);
    }
    let reference = results
        .iter()
        .find(|rv| rv.route == RouteChoice::Closed)
        .map(|rv| rv.value)
        .unwrap_or_else(|| results.iter().map(|rv| rv.value).sum::<f64>() / results.len() as f64);
    Some((hi - lo) / reference.abs().max(f64::MIN_POSITIVE))
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct HoleeBondArgs {
    /// Short rate today
    #[arg(long)]
    x: Option<f64>,
    /// Volatility (> 0)
    #[arg(long)]
    sigma: Option<f64>,
    /// Drift
    #[arg(long)]
    mu: Option<f64>,
    /// Discount susceptibility (defaults to 1: unit bond)
    #[arg(long)]
    beta: Option<f64>,
    /// Maturity (> 0)
    #[arg(long)]
    tau: Option<f64>,
}

pub fn run_holee_bond(args: &HoleeBondArgs, ctx: &Ctx) -> Result<(), Failure> {
    let mode = resolve_output(ctx.output, ctx.file.output.as_deref(), OutputMode::Table)?;
    let x = need("x", args.x, ctx.file.x)?;
    let tau = need("tau", args.tau, ctx.file.tau)?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(validation(format!("tau must be > 0, got {tau}")));
    }
    let sigma = need("sigma", args.sigma, ctx.file.sigma)?;
    let mu = pick(args.mu, ctx.file.mu, 0.0);
    let beta = pick(args.beta, ctx.file.beta, 1.0);
    let params = ModelParams::ho_lee(sigma, mu, beta);
    params.validate(gqp_core::ModelKind::HoLee)?;
    let value = holee_bond(x, tau, &params)?;
    match mode {
        OutputMode::Table => {
            println!(
                "holee-bond  x={} sigma={} mu={} beta={} tau={}",
                sig6(x),
                sig6(sigma),
                sig6(mu),
                sig6(beta),
                sig6(tau)
            );
            println!("value  {}", sig6(value));
        }
        OutputMode::Csv => {
            println!("x,tau,value");
            println!("{},{},{}", machine(x), machine(tau), machine(value));
        }
        OutputMode::Json => {
            println!(
                "{}",
                serde_json::json!({
                    "instrument": "holee-bond",
                    "x": x,
                    "tau": tau,
                    "value": value,
                })
            );
        }
    }
    Ok(())
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PropagateArgs {
    /// Model whose kernel propagates the payoff
    #[arg(long, value_enum)]
    model: Option<ModelChoice>,
    #[command(flatten)]
    params: ParamFlags,
    /// Horizon (> 0)
    #[arg(long)]
    tau: Option<f64>,
    /// Payoff to propagate
    #[arg(long, value_enum)]
    payoff: Option<PayoffKind>,
    /// Call strike (payoff call)
    #[arg(long)]
    strike: Option<f64>,
    /// Gaussian center (payoff gauss)
    #[arg(long)]
    center: Option<f64>,
    /// Gaussian width (payoff gauss)
    #[arg(long)]
    width: Option<f64>,
    /// Evaluation point; repeat for several
    #[arg(long = "x")]
    xs: Vec<f64>,
    /// Quadrature half-width
    #[arg(long)]
    half_width: Option<f64>,
    /// Quadrature nodes
    #[arg(long)]
    nodes: Option<usize>,
}

pub fn run_propagate(args: &PropagateArgs, ctx: &Ctx) -> Result<(), Failure> {
    let mode = resolve_output(ctx.output, ctx.file.output.as_deref(), OutputMode::Table)?;
    let model = resolve_model(args.model, &ctx.file)?;
    let params = resolve_params(model, &args.params, &ctx.file)?;
    let tau = need("tau", args.tau, ctx.file.tau)?;
    let payoff = build_payoff(
        args.payoff,
        args.strike,
        args.center,
        args.width,
        &ctx.file,
        PayoffKind::Unit,
    )?;
    let xs: Vec<f64> = if !args.xs.is_empty() {
        args.xs.clone()
    } else if let Some(xs) = ctx.file.xs.clone() {
        xs
    } else {
        return Err(validation("missing --x (set the flag or a config key)"));
    };
    let q = QuadratureSpec::real_line(
        pick(args.half_width, ctx.file.half_width, 12.0),
        pick(args.nodes, ctx.file.nodes, 4097),
    );
    let f = payoff.closure();
    let values = propagate(model.kernel_kind(), f.as_ref(), tau, &xs, &params, &q)?;
    match mode {
        OutputMode::Table => {
            println!("propagate  model={} payoff={} tau={}", model_name(model), payoff.describe(), sig6(tau));
            let rows: Vec<Vec<String>> =
                xs.iter().zip(&values).map(|(x, v)| vec![sig6(*x), sig6(*v)]).collect();
            print_table(&["x", "value"], &rows);
        }
        OutputMode::Csv => {
            println!("x,value");
            for (x, v) in xs.iter().zip(&values) {
                println!("{},{}", machine(*x), machine(*v));
            }
        }
        OutputMode::Json => {
            for (x, v) in xs.iter().zip(&values) {
                println!(
                    "{}",
                    serde_json::json!({
                        "instrument": "propagate",
                        "model": model_name(model),
                        "x": x,
                        "value": v,
                    })
                );
            }
        }
    }
    Ok(())
}

pub fn model_name(model: ModelChoice) -> &'static str {
    match model {
        ModelChoice::Bs => "bs",
        ModelChoice::Holee => "holee",
        ModelChoice::Harmonic => "harmonic",
        ModelChoice::Repulsive => "repulsive",
    }
}
