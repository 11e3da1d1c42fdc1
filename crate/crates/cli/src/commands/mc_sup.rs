//! `mc-sup`: draw cell suprema, write the draws and a tail-comparison report.

use std::path::Path;

use levyband_core::basis::BasisFamily;
use levyband_core::gausssup::{
    self, asymptotic_tail, empirical_tail, haar_exact_absolute_tail, haar_exact_signed_tail,
    trig_j3_exact_tail, trig_refined_tail, SupMode, SupSampleConfig,
};
use serde::Serialize;

use crate::config::{resolve_mode, McSupConfig};
use crate::output::{config_hash, OutDir};
use crate::{parse, CliError};

#[derive(Serialize)]
struct TailRow {
    u: f64,
    mc: f64,
    mc_stderr: f64,
    asymptotic: f64,
    asymptotic_low_confidence: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    refined: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<f64>,
}

#[derive(Serialize)]
struct TailReport {
    config_hash: String,
    family: String,
    delta: f64,
    reps: usize,
    mode: String,
    rows: Vec<TailRow>,
}

pub fn run(raw: &str, seed_override: Option<u64>, out: &Path) -> Result<(), CliError> {
    let mut cfg: McSupConfig = parse(raw)?;
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    let family = cfg.family.resolve()?;
    let mode = resolve_mode(&cfg.mode)?;
    if cfg.u_list.is_empty() {
        return Err(CliError::config("u_list must not be empty"));
    }
    let grid = match (family, cfg.grid) {
        (BasisFamily::Haar, _) => 0, // exact two-point supremum
        (_, Some(g)) => g,
        (_, None) => 1024,
    };
    let sample_cfg = SupSampleConfig {
        family,
        delta: cfg.delta,
        grid,
        reps: cfg.reps,
        seed: cfg.seed,
        mode,
    };
    let draws = gausssup::sample_sup(&sample_cfg).map_err(CliError::from_core)?;

    let hash = config_hash(&cfg);
    let dir = OutDir::new(out, hash.clone())?;
    dir.write_csv(
        "draws.csv",
        "replicate,value",
        draws.iter().enumerate().map(|(i, v)| vec![i as f64, *v]),
    )?;

    let mut rows = Vec::new();
    for &u in &cfg.u_list {
        let (mc, se) = empirical_tail(&draws, u);
        let asym = asymptotic_tail(family, cfg.delta, u, mode).map_err(CliError::from_core)?;
        let refined = match family {
            BasisFamily::Trigonometric(j) => {
                let mut r = trig_refined_tail(j, cfg.delta, u).map_err(CliError::from_core)?;
                if mode == SupMode::Absolute {
                    r *= 2.0;
                }
                Some(r)
            }
            _ => None,
        };
        let exact = match (family, mode) {
            (BasisFamily::Haar, SupMode::Signed) => Some(haar_exact_signed_tail(cfg.delta, u)),
            (BasisFamily::Haar, SupMode::Absolute) => {
                Some(haar_exact_absolute_tail(cfg.delta, u))
            }
            (BasisFamily::Trigonometric(2), SupMode::Signed) => {
                Some(trig_j3_exact_tail(cfg.delta, u))
            }
            _ => None,
        };
        rows.push(TailRow {
            u,
            mc,
            mc_stderr: se,
            asymptotic: asym.value,
            asymptotic_low_confidence: asym.low_confidence,
            refined,
            exact,
        });
    }
    let report = TailReport {
        config_hash: hash,
        family: cfg.family.family.clone(),
        delta: cfg.delta,
        reps: cfg.reps,
        mode: cfg.mode.clone(),
        rows,
    };
    dir.write_json("tail_report.json", &report)?;
    Ok(())
}
