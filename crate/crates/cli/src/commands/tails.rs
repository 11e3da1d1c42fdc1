//! `tails`: the Lévy density and jump-measure tail on an x-grid.

use std::path::Path;

use crate::config::TailsConfig;
use crate::output::{config_hash, OutDir};
use crate::{parse, CliError};

pub fn run(raw: &str, out: &Path) -> Result<(), CliError> {
    let cfg: TailsConfig = parse(raw)?;
    if !(cfg.x_min > 0.0 && cfg.x_max > cfg.x_min) || cfg.points < 2 {
        return Err(CliError::config("need 0 < x_min < x_max and points >= 2"));
    }
    let hash = config_hash(&cfg);
    let dir = OutDir::new(out, hash)?;
    let mut rows = Vec::with_capacity(cfg.points);
    for i in 0..cfg.points {
        let x = cfg.x_min + (cfg.x_max - cfg.x_min) * i as f64 / (cfg.points - 1) as f64;
        let density = cfg.model.levy_density(x).map_err(CliError::from_core)?;
        let tail = cfg.model.levy_tail(x).map_err(CliError::from_core)?;
        rows.push(vec![x, density, tail]);
    }
    dir.write_csv("tails.csv", "x,levy_density,levy_tail", rows.into_iter())?;
    Ok(())
}
