//! `gqp` — command-line front end for the group-quantization pricing
//! library. Orchestration is single-threaded; parallelism lives in the
//! library's Monte Carlo and propagation layers and is capped by the
//! `GQP_THREADS` environment variable.

mod cmd_kernel;
mod cmd_mc;
mod cmd_price;
mod cmd_transform;
mod cmd_verify;
mod config;
mod failure;
mod model;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::FileConfig;
use failure::{validation, Failure};
use render::OutputMode;

#[derive(Parser)]
#[command(
    name = "gqp",
    version,
    about = "Group-quantization pricing: kernels, transforms, Monte Carlo, verification",
    propagate_version = true
)]
struct Cli {
    /// JSON file supplying defaults for any flag (flags win)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output format; commands default to table except `kernel` (csv)
    #[arg(long, global = true, value_enum)]
    output: Option<OutputMode>,
    /// Seed for stochastic commands; generated and echoed when omitted
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price an instrument
    #[command(subcommand)]
    Price(Instrument),
    /// Tabulate a pricing kernel on a grid
    Kernel(cmd_kernel::KernelArgs),
    /// Apply an integral transform and check it against its reference
    #[command(subcommand)]
    Transform(TransformCmd),
    /// Feynman-Kac Monte Carlo estimate
    Mc(cmd_mc::McArgs),
    /// Run the named residual check suites
    Verify(cmd_verify::VerifyArgs),
}

#[derive(Subcommand)]
enum Instrument {
    /// European call under Black-Scholes, by any of four routes
    BsCall(cmd_price::BsCallArgs),
    /// Ho-Lee zero-coupon bond
    HoleeBond(cmd_price::HoleeBondArgs),
    /// Propagate a payoff under a model's kernel
    Propagate(cmd_price::PropagateArgs),
}

#[derive(Subcommand)]
enum TransformCmd {
    /// Invert the momentum-space propagator along a Bromwich contour
    Bromwich(cmd_transform::BromwichArgs),
    /// Price a call by inverse Mellin transform
    Mellin(cmd_transform::MellinArgs),
    /// Evaluate the Gaussian LCT kernel of a model base action
    Lct(cmd_transform::LctArgs),
}

/// Resolved global options handed to every command.
pub struct Ctx {
    pub file: FileConfig,
    pub output: Option<OutputMode>,
    pub seed_flag: Option<u64>,
}

impl Ctx {
    /// Explicit seed if given, else a fresh one (callers echo it).
    pub fn seed(&self) -> u64 {
        self.seed_flag.or(self.file.seed).unwrap_or_else(generate_seed)
    }

    /// Explicit seed if given, else `default` (deterministic commands).
    pub fn seed_or(&self, default: u64) -> u64 {
        self.seed_flag.or(self.file.seed).unwrap_or(default)
    }
}

fn generate_seed() -> u64 {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    nanos.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((std::process::id() as u64) << 32)
}

/// Cap library parallelism before any pool is spawned.
fn init_threads() -> Result<(), Failure> {
    match std::env::var("GQP_THREADS") {
        Ok(raw) => {
            let n: usize = raw
                .trim()
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| {
                    validation(format!("GQP_THREADS must be a positive integer, got {raw:?}"))
                })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| validation(format!("cannot configure thread pool: {e}")))
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(validation(format!("GQP_THREADS is not valid unicode: {e}"))),
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    init_threads()?;
    let file = config::load(cli.config.as_deref())?;
    let ctx = Ctx { file, output: cli.output, seed_flag: cli.seed };
    match &cli.command {
        Command::Price(Instrument::BsCall(args)) => cmd_price::run_bs_call(args, &ctx),
        Command::Price(Instrument::HoleeBond(args)) => cmd_price::run_holee_bond(args, &ctx),
        Command::Price(Instrument::Propagate(args)) => cmd_price::run_propagate(args, &ctx),
        Command::Kernel(args) => cmd_kernel::run(args, &ctx),
        Command::Transform(TransformCmd::Bromwich(args)) => cmd_transform::run_bromwich(args, &ctx),
        Command::Transform(TransformCmd::Mellin(args)) => cmd_transform::run_mellin(args, &ctx),
        Command::Transform(TransformCmd::Lct(args)) => cmd_transform::run_lct(args, &ctx),
        Command::Mc(args) => cmd_mc::run(args, &ctx),
        Command::Verify(args) => cmd_verify::run(args, &ctx),
    }
}

// Rust ignores SIGPIPE by default, turning `gqp kernel | head` into a panic.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
