//! `transform` subcommands: each one inverts or applies an integral
//! transform and reports the deviation from an independent reference, so a
//! run doubles as a self-check of the contour placement.

use clap::Args;
use gqp_core::group::sl2_generator;
use gqp_core::kernels::{bs_kernel, kernel_eval};
use gqp_core::models::{bs_call_closed, bs_call_mellin, mellin_defaults, CallSpec};
use gqp_core::transforms::{bromwich_invert, lct_kernel, Complex64, QuadratureSpec};
use gqp_core::ModelParams;

use crate::config::{need, pick};
use crate::failure::Failure;
use crate::model::{resolve_model, resolve_params, ModelChoice, ParamFlags};
use crate::render::{machine, print_table, resolve_output, sig6, OutputMode};
use crate::Ctx;

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BromwichArgs {
    /// Volatility (> 0)
    #[arg(long)]
    sigma: Option<f64>,
    /// Discount rate
    #[arg(long)]
    r: Option<f64>,
    /// Drift
    #[arg(long)]
    mu: Option<f64>,
    /// Elapsed time (> 0)
    #[arg(long)]
    tau: Option<f64>,
    /// Evaluation point
    #[arg(long)]
    x: Option<f64>,
    /// Kernel target point
    #[arg(long)]
    xprime: Option<f64>,
    /// Contour abscissa
    #[arg(long)]
    c: Option<f64>,
    /// Contour half-width
    #[arg(long)]
    half_width: Option<f64>,
    /// Contour nodes
    #[arg(long)]
    nodes: Option<usize>,
}

/// Inverts the momentum-space propagator
/// `exp((½σ²p² + μp − r)τ − p x')` along `Re p = c` and compares the result
/// with the closed-form kernel it must reproduce.
pub fn run_bromwich(args: &BromwichArgs, ctx: &Ctx) -> Result<(), Failure> {
    let mode = resolve_output(ctx.output, ctx.file.output.as_deref(), OutputMode::Table)?;
    let sigma = need("sigma", args.sigma, ctx.file.sigma)?;
    let r = pick(args.r, ctx.file.r, 0.0);
    let mu = pick(args.mu, ctx.file.mu, 0.0);
    let tau = need("tau", args.tau, ctx.file.tau)?;
    let x = pick(args.x, ctx.file.x, 0.0);
    let xprime = pick(args.xprime, ctx.file.xprime, 0.0);
    let params = ModelParams::black_scholes(sigma, r, mu);
    params.validate(gqp_core::ModelKind::BlackScholes)?;

    // Contour decay is exp(−½σ²τ s²); reach ~1e−16 of the peak by default.
    let hw_default = (74.0 / (sigma * sigma * tau)).sqrt().max(15.0);
    let q = QuadratureSpec::bromwich(
        pick(args.c, ctx.file.c, 0.0),
        pick(args.half_width, ctx.file.half_width, hw_default),
        pick(args.nodes, ctx.file.nodes, 4096),
    );
    let s2 = sigma * sigma;
    let fhat = move |p: Complex64| -> Complex64 {
        ((0.5 * s2 * p * p + mu * p - r) * tau - p * xprime).exp()
    };
    let out = bromwich_invert(&fhat, &q, x)?;
    let reference = bs_kernel(x, xprime, tau, &params)?;
    let deviation = (out.value - reference).abs();

    match mode {
        OutputMode::Table => {
            println!("bromwich  x={} xprime={} tau={} c={}", sig6(x), sig6(xprime), sig6(tau), sig6(q.c));
            let rows = vec![
                vec!["value".to_string(), sig6(out.value)],
                vec!["reference".to_string(), sig6(reference)],
                vec!["abs_deviation".to_string(), sig6(deviation)],
                vec!["imag_residual".to_string(), sig6(out.imag_residual)],
                vec!["tail_ratio".to_string(), sig6(out.tail_ratio)],
            ];
            print_table(&["quantity", "value"], &rows);
        }
        OutputMode::Csv => {
            println!("value,reference,abs_deviation,imag_residual,tail_ratio");
            println!(
                "{},{},{},{},{}",
                machine(out.value),
                machine(reference),
                machine(deviation),
                machine(out.imag_residual),
                machine(out.tail_ratio)
            );
        }
        OutputMode::Json => {
            println!(
                "{}",
                serde_json::json!({
                    "transform": "bromwich",
                    "value": out.value,
                    "reference": reference,
                    "abs_deviation": deviation,
                    "imag_residual": out.imag_residual,
                    "tail_ratio": out.tail_ratio,
                })
            );
        }
    }
    Ok(())
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct MellinArgs {
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
    /// Contour abscissa (> 1)
    #[arg(long)]
    c: Option<f64>,
    /// Contour half-width
    #[arg(long)]
    half_width: Option<f64>,
    /// Contour nodes
    #[arg(long)]
    nodes: Option<usize>,
}

/// Prices a call by inverse Mellin transform and reports the relative
/// deviation from the lognormal closed form.
pub fn run_mellin(args: &MellinArgs, ctx: &Ctx) -> Result<(), Failure> {
    let mode = resolve_output(ctx.output, ctx.file.output.as_deref(), OutputMode::Table)?;
    let spot = need("spot", args.spot, ctx.file.spot)?;
    let strike = need("strike", args.strike, ctx.file.strike)?;
    let tau = need("tau", args.tau, ctx.file.tau)?;
    let sigma = need("sigma", args.sigma, ctx.file.sigma)?;
    let r = pick(args.r, ctx.file.r, 0.0);
    let spec = CallSpec::new(spot, strike, tau, sigma, r)?;

    let (c_default, q_default) = mellin_defaults(&spec);
    let c = pick(args.c, ctx.file.c, c_default);
    let q = QuadratureSpec::bromwich(
        c,
        pick(args.half_width, ctx.file.half_width, q_default.half_width),
        pick(args.nodes, ctx.file.nodes, q_default.nodes),
    );
    let value = bs_call_mellin(&spec, c, &q)?;
    let reference = bs_call_closed(&spec)?;
    let rel = (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);

    match mode {
        OutputMode::Table => {
            println!(
                "mellin  spot={} strike={} tau={} sigma={} r={} c={}",
                sig6(spot),
                sig6(strike),
                sig6(tau),
                sig6(sigma),
                sig6(r),
                sig6(c)
            );
            let rows = vec![
                vec!["value".to_string(), sig6(value)],
                vec!["closed".to_string(), sig6(reference)],
                vec!["rel_deviation".to_string(), sig6(rel)],
            ];
            print_table(&["quantity", "value"], &rows);
        }
        OutputMode::Csv => {
            println!("value,closed,rel_deviation");
            println!("{},{},{}", machine(value), machine(reference), machine(rel));
        }
        OutputMode::Json => {
            println!(
                "{}",
                serde_json::json!({
                    "transform": "mellin",
                    "value": value,
                    "closed": reference,
                    "rel_deviation": rel,
                })
            );
        }
    }
    Ok(())
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LctArgs {
    /// Model whose base action supplies the LCT matrix
    #[arg(long, value_enum)]
    model: Option<ModelChoice>,
    #[command(flatten)]
    params: ParamFlags,
    /// Group time of the base action (> 0 for a usable kernel)
    #[arg(long)]
    t: Option<f64>,
    /// Evaluation point x
    #[arg(long)]
    x: Option<f64>,
    /// Evaluation point x'
    #[arg(long)]
    xprime: Option<f64>,
}

/// Evaluates the Gaussian LCT kernel of the model's base action and, when
/// the model kernel at the same time is itself that Gaussian (oscillators
/// always; Black-Scholes with r = mu = 0), reports the deviation.
pub fn run_lct(args: &LctArgs, ctx: &Ctx) -> Result<(), Failure> {
    let mode = resolve_output(ctx.output, ctx.file.output.as_deref(), OutputMode::Table)?;
    let model = resolve_model(args.model, &ctx.file)?;
    let params = resolve_params(model, &args.params, &ctx.file)?;
    let t = need("t", args.t, ctx.file.t)?;
    let x = pick(args.x, ctx.file.x, 0.0);
    let xprime = pick(args.xprime, ctx.file.xprime, 0.0);

    let m = sl2_generator(model.kind(), t, &params)?;
    let value = lct_kernel(&m, x, xprime)?;
    let reference = match model {
        ModelChoice::Harmonic | ModelChoice::Repulsive => {
            Some(kernel_eval(model.kernel_kind(), x, xprime, t, &params)?)
        }
        ModelChoice::Bs if params.r == 0.0 && params.mu == 0.0 => {
            Some(kernel_eval(model.kernel_kind(), x, xprime, t, &params)?)
        }
        _ => None,
    };
    let deviation = reference.map(|k| (value - k).abs());

    match mode {
        OutputMode::Table => {
            println!("lct  model={} t={} x={} xprime={}", super::cmd_price::model_name(model), sig6(t), sig6(x), sig6(xprime));
            println!(
                "matrix  [[{}, {}], [{}, {}]]",
                sig6(m.a),
                sig6(m.b),
                sig6(m.c),
                sig6(m.d)
            );
            let mut rows = vec![vec!["value".to_string(), sig6(value)]];
            if let (Some(k), Some(d)) = (reference, deviation) {
                rows.push(vec!["kernel".to_string(), sig6(k)]);
                rows.push(vec!["abs_deviation".to_string(), sig6(d)]);
            }
            print_table(&["quantity", "value"], &rows);
        }
        OutputMode::Csv => {
            println!("a,b,c,d,value,kernel,abs_deviation");
            println!(
                "{},{},{},{},{},{},{}",
                machine(m.a),
                machine(m.b),
                machine(m.c),
                machine(m.d),
                machine(value),
                reference.map(machine).unwrap_or_default(),
                deviation.map(machine).unwrap_or_default()
            );
        }
        OutputMode::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("transform".into(), "lct".into());
            obj.insert("a".into(), m.a.into());
            obj.insert("b".into(), m.b.into());
            obj.insert("c".into(), m.c.into());
            obj.insert("d".into(), m.d.into());
            obj.insert("value".into(), value.into());
            if let (Some(k), Some(d)) = (reference, deviation) {
                obj.insert("kernel".into(), k.into());
                obj.insert("abs_deviation".into(), d.into());
            }
            println!("{}", serde_json::Value::Object(obj));
        }
    }
    Ok(())
}
