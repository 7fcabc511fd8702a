//! Optional JSON run configuration. Precedence is flags over file over
//! defaults; unknown keys are rejected so typos fail loudly.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::failure::{validation, Failure};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    // Model and parameters.
    pub model: Option<String>,
    pub sigma: Option<f64>,
    pub r: Option<f64>,
    pub mu: Option<f64>,
    pub beta: Option<f64>,
    pub omega: Option<f64>,

    // Instrument fields.
    pub spot: Option<f64>,
    pub strike: Option<f64>,
    pub tau: Option<f64>,
    pub x: Option<f64>,
    pub xprime: Option<f64>,
    pub t: Option<f64>,
    pub routes: Option<String>,

    // Payoff description.
    pub payoff: Option<String>,
    pub center: Option<f64>,
    pub width: Option<f64>,

    // Monte Carlo.
    pub x0: Option<f64>,
    pub horizon: Option<f64>,
    pub steps: Option<usize>,
    pub n_paths: Option<usize>,
    pub antithetic: Option<bool>,

    // Grids and contours.
    pub xs: Option<Vec<f64>>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub x_count: Option<usize>,
    pub xprime_min: Option<f64>,
    pub xprime_max: Option<f64>,
    pub xprime_count: Option<usize>,
    pub c: Option<f64>,
    pub half_width: Option<f64>,
    pub nodes: Option<usize>,

    // Verify.
    pub only: Option<String>,
    pub json: Option<bool>,

    // Global.
    pub output: Option<String>,
    pub seed: Option<u64>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, Failure> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| validation(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| validation(format!("invalid config {}: {e}", path.display())))
}

/// Flag value, else file value, else an error naming the missing flag.
pub fn need<T>(name: &str, flag: Option<T>, file: Option<T>) -> Result<T, Failure> {
    flag.or(file)
        .ok_or_else(|| validation(format!("missing --{name} (set the flag or a config key)")))
}

/// Flag value, else file value, else the default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
