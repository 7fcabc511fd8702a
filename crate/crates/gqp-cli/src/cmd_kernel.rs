//! `kernel`: tabulate a model's pricing kernel on a rectangular grid,
//! row-major in `x` then `x'`. Every value is computed before the first
//! row is printed so domain errors never leave partial output behind.

use clap::Args;
use gqp_core::kernels::kernel_eval;

use crate::config::{need, pick};
use crate::failure::{validation, Failure};
use crate::model::{resolve_model, resolve_params, ModelChoice, ParamFlags};
use crate::render::{machine, print_table, resolve_output, sig6, OutputMode};
use crate::Ctx;

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct KernelArgs {
    /// Model whose kernel to tabulate
    #[arg(long, value_enum)]
    model: Option<ModelChoice>,
    #[command(flatten)]
    params: ParamFlags,
    /// Elapsed time (> 0)
    #[arg(long)]
    tau: Option<f64>,
    /// Smallest x
    #[arg(long)]
    x_min: Option<f64>,
    /// Largest x
    #[arg(long)]
    x_max: Option<f64>,
    /// Number of x nodes
    #[arg(long)]
    x_count: Option<usize>,
    /// Smallest x' (defaults to the x grid)
    #[arg(long)]
    xprime_min: Option<f64>,
    /// Largest x'
    #[arg(long)]
    xprime_max: Option<f64>,
    /// Number of x' nodes
    #[arg(long)]
    xprime_count: Option<usize>,
}

fn grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>, Failure> {
    if count == 0 {
        return Err(validation("grid needs at least one node"));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    if !(max > min) {
        return Err(validation(format!("grid needs max > min, got [{min}, {max}]")));
    }
    let h = (max - min) / (count - 1) as f64;
    Ok((0..count).map(|i| min + h * i as f64).collect())
}

pub fn run(args: &KernelArgs, ctx: &Ctx) -> Result<(), Failure> {
    let mode = resolve_output(ctx.output, ctx.file.output.as_deref(), OutputMode::Csv)?;
    let model = resolve_model(args.model, &ctx.file)?;
    let params = resolve_params(model, &args.params, &ctx.file)?;
    let tau = need("tau", args.tau, ctx.file.tau)?;

    let x_min = pick(args.x_min, ctx.file.x_min, -1.0);
    let x_max = pick(args.x_max, ctx.file.x_max, 1.0);
    let x_count = pick(args.x_count, ctx.file.x_count, 3);
    let xs = grid(x_min, x_max, x_count)?;
    let xps = grid(
        pick(args.xprime_min, ctx.file.xprime_min, x_min),
        pick(args.xprime_max, ctx.file.xprime_max, x_max),
        pick(args.xprime_count, ctx.file.xprime_count, x_count),
    )?;

    let kind = model.kernel_kind();
    let mut rows = Vec::with_capacity(xs.len() * xps.len());
    for &x in &xs {
        for &xp in &xps {
            let k = kernel_eval(kind, x, xp, tau, &params)?;
            rows.push((x, xp, k));
        }
    }

    match mode {
        OutputMode::Csv => {
            println!("x,x_prime,tau,k");
            for &(x, xp, k) in &rows {
                println!("{},{},{},{}", machine(x), machine(xp), machine(tau), machine(k));
            }
        }
        OutputMode::Table => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|&(x, xp, k)| vec![sig6(x), sig6(xp), sig6(tau), sig6(k)])
                .collect();
            print_table(&["x", "x_prime", "tau", "k"], &body);
        }
        OutputMode::Json => {
            for &(x, xp, k) in &rows {
                println!(
                    "{}",
                    serde_json::json!({"x": x, "x_prime": xp, "tau": tau, "k": k})
                );
            }
        }
    }
    Ok(())
}
