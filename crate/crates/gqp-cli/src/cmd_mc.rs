//! `mc`: Feynman-Kac Monte Carlo for any model, with the matching analytic
//! route (closed form or kernel quadrature) reported alongside when one
//! exists so the z-score is visible at a glance.

use clap::Args;
use gqp_core::kernels::propagate;
use gqp_core::mc::{fk_price, PathSpec};
use gqp_core::models::{bs_call_closed, holee_bond, martingale_mu, CallSpec};
use gqp_core::transforms::QuadratureSpec;

use crate::config::{need, pick};
use crate::failure::Failure;
use crate::model::{build_payoff, resolve_model, resolve_params, ModelChoice, ParamFlags, Payoff, PayoffKind};
use crate::render::{machine, print_table, resolve_output, sig6, OutputMode};
use crate::Ctx;

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct McArgs {
    /// Model supplying dynamics and discounting
    #[arg(long, value_enum)]
    model: Option<ModelChoice>,
    #[command(flatten)]
    params: ParamFlags,
    /// Payoff at the horizon
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
    /// Starting state
    #[arg(long)]
    x0: Option<f64>,
    /// Simulation horizon (> 0)
    #[arg(long)]
    horizon: Option<f64>,
    /// Time steps per path
    #[arg(long)]
    steps: Option<usize>,
    /// Number of paths
    #[arg(long)]
    n_paths: Option<usize>,
    /// Antithetic pairing (true/false)
    #[arg(long)]
    antithetic: Option<bool>,
}

/// Closed-form or quadrature value of the same expectation, when one of the
/// library routes covers this (model, payoff) pair.
fn analytic_reference(
    model: ModelChoice,
    payoff: &Payoff,
    x0: f64,
    horizon: f64,
    params: &gqp_core::ModelParams,
) -> Result<Option<f64>, Failure> {
    let value = match (model, payoff.kind) {
        (ModelChoice::Bs, PayoffKind::Call) => {
            if params.mu == martingale_mu(params.r, params.sigma) {
                let spec = CallSpec::new(x0.exp(), payoff.strike, horizon, params.sigma, params.r)?;
                Some(bs_call_closed(&spec)?)
            } else {
                None
            }
        }
        (ModelChoice::Bs, PayoffKind::Unit) => Some((-params.r * horizon).exp()),
        (ModelChoice::Bs, PayoffKind::Exp) => Some(
            (-params.r * horizon
                + x0
                + params.mu * horizon
                + 0.5 * params.sigma * params.sigma * horizon)
                .exp(),
        ),
        (ModelChoice::Holee, PayoffKind::Unit) => Some(holee_bond(x0, horizon, params)?),
        (ModelChoice::Harmonic | ModelChoice::Repulsive, PayoffKind::Unit | PayoffKind::Gauss) => {
            let f = payoff.closure();
            let q = QuadratureSpec::real_line(12.0, 4097);
            Some(propagate(model.kernel_kind(), f.as_ref(), horizon, &[x0], params, &q)?[0])
        }
        _ => None,
    };
    Ok(value)
}

pub fn run(args: &McArgs, ctx: &Ctx) -> Result<(), Failure> {
    let mode = resolve_output(ctx.output, ctx.file.output.as_deref(), OutputMode::Table)?;
    let model = resolve_model(args.model, &ctx.file)?;
    let params = resolve_params(model, &args.params, &ctx.file)?;
    let payoff = build_payoff(
        args.payoff,
        args.strike,
        args.center,
        args.width,
        &ctx.file,
        PayoffKind::Unit,
    )?;
    let x0 = need("x0", args.x0, ctx.file.x0)?;
    let horizon = need("horizon", args.horizon, ctx.file.horizon)?;
    let seed = ctx.seed();

    let spec = PathSpec {
        x0,
        mu: params.mu,
        sigma: params.sigma,
        horizon,
        steps: pick(args.steps, ctx.file.steps, 200),
        n_paths: pick(args.n_paths, ctx.file.n_paths, 100_000),
        seed,
        antithetic: pick(args.antithetic, ctx.file.antithetic, true),
    };
    let f = payoff.closure();
    let result = fk_price(model.kind(), f.as_ref(), &spec, &params)?;
    let analytic = analytic_reference(model, &payoff, x0, horizon, &params)?;
    let diff = analytic.map(|a| (result.estimate - a).abs());
    let z = diff.map(|d| d / result.std_error);

    match mode {
        OutputMode::Table => {
            println!(
                "mc  model={} payoff={} x0={} horizon={} steps={} n_paths={} antithetic={}",
                super::cmd_price::model_name(model),
                payoff.describe(),
                sig6(x0),
                sig6(horizon),
                spec.steps,
                spec.n_paths,
                spec.antithetic
            );
            println!("seed  {seed}");
            let mut rows = vec![
                vec!["estimate".to_string(), sig6(result.estimate)],
                vec!["std_error".to_string(), sig6(result.std_error)],
            ];
            if let (Some(a), Some(d), Some(z)) = (analytic, diff, z) {
                rows.push(vec!["analytic".to_string(), sig6(a)]);
                rows.push(vec!["abs_diff".to_string(), sig6(d)]);
                rows.push(vec!["z".to_string(), sig6(z)]);
            }
            print_table(&["quantity", "value"], &rows);
        }
        OutputMode::Csv => {
            println!("estimate,std_error,n_paths,seed,analytic,abs_diff,z");
            println!(
                "{},{},{},{},{},{},{}",
                machine(result.estimate),
                machine(result.std_error),
                result.n_paths,
                seed,
                analytic.map(machine).unwrap_or_default(),
                diff.map(machine).unwrap_or_default(),
                z.map(machine).unwrap_or_default()
            );
        }
        OutputMode::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("model".into(), super::cmd_price::model_name(model).into());
            obj.insert("estimate".into(), result.estimate.into());
            obj.insert("std_error".into(), result.std_error.into());
            obj.insert("n_paths".into(), result.n_paths.into());
            obj.insert("seed".into(), seed.into());
            if let (Some(a), Some(d), Some(zv)) = (analytic, diff, z) {
                obj.insert("analytic".into(), a.into());
                obj.insert("abs_diff".into(), d.into());
                obj.insert("z".into(), zv.into());
            }
            println!("{}", serde_json::Value::Object(obj));
        }
    }
    Ok(())
}
