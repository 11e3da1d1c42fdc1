//! `smalltime`: the small-time diagnostic over a list of steps, with the
//! fitted constant.

use std::path::Path;

use serde::Serialize;

use crate::config::SmallTimeConfig;
use crate::output::{config_hash, OutDir};
use crate::{parse, CliError};

#[derive(Serialize)]
struct SmallTimeReport {
    config_hash: String,
    q_fitted: f64,
    q_default: f64,
}

pub fn run(raw: &str, out: &Path) -> Result<(), CliError> {
    let cfg: SmallTimeConfig = parse(raw)?;
    if cfg.deltas.is_empty() {
        return Err(CliError::config("deltas must not be empty"));
    }
    let window = cfg.window.resolve()?;
    let hash = config_hash(&cfg);
    let dir = OutDir::new(out, hash.clone())?;
    let mut rows = Vec::new();
    let mut q_fit: f64 = 0.0;
    for &d in &cfg.deltas {
        if !(d > 0.0) {
            return Err(CliError::config("deltas must be positive"));
        }
        let v = cfg
            .model
            .small_time_check(&window, d, cfg.grid)
            .map_err(CliError::from_core)?;
        q_fit = q_fit.max(v / d);
        rows.push(vec![d, v, v / d]);
    }
    dir.write_csv("smalltime.csv", "delta,sup_diff,ratio", rows.into_iter())?;
    dir.write_json(
        "smalltime.json",
        &SmallTimeReport { config_hash: hash, q_fitted: q_fit, q_default: 2.0 * q_fit },
    )?;
    Ok(())
}
