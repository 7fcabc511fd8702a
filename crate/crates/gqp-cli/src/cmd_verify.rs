//! `verify`: run the named residual checks and report pass/fail per check.
//! Exit status is 0 only when every check passes; the full report is always
//! printed first.

use clap::Args;
use gqp_core::verify::{self, CheckResult, Suite};

use crate::failure::Failure;
use crate::render::{machine, print_table, resolve_output, sig6, OutputMode};
use crate::Ctx;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run a single suite: group, geometry, special, transform, kernel,
    /// model, or mc
    #[arg(long)]
    only: Option<String>,
    /// Emit one JSON object per check (shorthand for --output json)
    #[arg(long)]
    json: bool,
}

pub fn run(args: &VerifyArgs, ctx: &Ctx) -> Result<(), Failure> {
    let mode = if args.json || ctx.file.json == Some(true) {
        OutputMode::Json
    } else {
        resolve_output(ctx.output, ctx.file.output.as_deref(), OutputMode::Table)?
    };
    let seed = ctx.seed_or(verify::DEFAULT_SEED);
    let only = match args.only.as_deref().or(ctx.file.only.as_deref()) {
        Some(name) => Some(name.parse::<Suite>().map_err(Failure::from)?),
        None => None,
    };
    let results: Vec<CheckResult> = match only {
        Some(suite) => verify::run_suite(suite, seed),
        None => verify::run_all(seed),
    };
    let failed = results.iter().filter(|c| !c.pass).count();

    match mode {
        OutputMode::Table => {
            println!("verify  seed={seed}");
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|c| {
                    vec![
                        c.suite.as_str().to_string(),
                        c.name.clone(),
                        if c.pass { "PASS" } else { "FAIL" }.to_string(),
                        sig6(c.residual),
                        sig6(c.tolerance),
                    ]
                })
                .collect();
            print_table(&["suite", "check", "status", "residual", "tolerance"], &rows);
            println!(
                "summary  {} checks, {} passed, {} failed",
                results.len(),
                results.len() - failed,
                failed
            );
        }
        OutputMode::Csv => {
            println!("suite,name,residual,tolerance,pass");
            for c in &results {
                println!(
                    "{},{},{},{},{}",
                    c.suite.as_str(),
                    c.name,
                    machine(c.residual),
                    machine(c.tolerance),
                    c.pass
                );
            }
        }
        OutputMode::Json => {
            for c in &results {
                // Non-finite residuals (errored measurements) become null.
                println!(
                    "{}",
                    serde_json::json!({
                        "name": format!("{}/{}", c.suite.as_str(), c.name),
                        "residual": c.residual,
                        "tolerance": c.tolerance,
                        "pass": c.pass,
                    })
                );
            }
        }
    }

    if failed > 0 {
        Err(Failure::ChecksFailed { failed, total: results.len() })
    } else {
        Ok(())
    }
}
