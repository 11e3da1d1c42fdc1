//! `simulate`: write an increment sample as CSV plus a JSON sidecar.

use std::path::Path;

use crate::config::{IncrementSidecar, SimulateConfig};
use crate::output::{config_hash, OutDir};
use crate::{parse, CliError};

pub fn run(raw: &str, seed_override: Option<u64>, out: &Path) -> Result<(), CliError> {
    let mut cfg: SimulateConfig = parse(raw)?;
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    let sample = cfg
        .model
        .sample_increments(cfg.n, cfg.delta, cfg.seed)
        .map_err(CliError::from_core)?;
    let hash = config_hash(&cfg);
    let dir = OutDir::new(out, hash)?;
    dir.write_csv(
        "increments.csv",
        "increment",
        sample.values.iter().map(|v| vec![*v]),
    )?;
    dir.write_json(
        "increments.json",
        &IncrementSidecar {
            model: Some(cfg.model),
            n: cfg.n,
            delta: cfg.delta,
            seed: cfg.seed,
        },
    )?;
    Ok(())
}
