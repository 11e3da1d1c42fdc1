//! `band`: fit one estimate and emit its confidence band, or run a coverage
//! experiment over independent replications.

use std::path::Path;

use levyband_core::bands::{self, S_FLOOR_DEFAULT};
use levyband_core::basis::BasisSystem;
use levyband_core::estimator;
use levyband_core::levy::IncrementSample;
use levyband_core::limits::{self, BiasConstants};
use serde::Serialize;

use crate::config::{BandConfig, IncrementSidecar};
use crate::output::{config_hash, OutDir};
use crate::{parse, CliError};

#[derive(Serialize)]
struct BandMeta {
    config_hash: String,
    m: usize,
    n: usize,
    level: f64,
    half_width_scale: f64,
    q: f64,
    lambda_n: f64,
    lambda_warning: bool,
    in_regime: bool,
    regime_warning: Option<String>,
}

#[derive(Serialize)]
struct CoverageReport {
    config_hash: String,
    coverage: f64,
    reps: usize,
    m: usize,
    n: usize,
    level: f64,
    q: f64,
    lambda_n: f64,
    lambda_warning: bool,
    in_regime: bool,
}

pub fn run(raw: &str, seed_override: Option<u64>, out: &Path) -> Result<(), CliError> {
    let mut cfg: BandConfig = parse(raw)?;
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    let family = cfg.family.resolve()?;
    let window = cfg.window.resolve()?;
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(CliError::config("level must be in (0,1)"));
    }
    let hash = config_hash(&cfg);
    let dir = OutDir::new(out, hash.clone())?;

    // q: explicit, or fitted from the model's small-time diagnostic, doubled.
    let q = match (cfg.q, &cfg.model) {
        (Some(q), _) if q > 0.0 => q,
        (Some(_), _) => return Err(CliError::config("q must be positive")),
        (None, Some(model)) => {
            let fitted = model
                .fit_small_time_q(&window, &[1e-2, 1e-3, 1e-4], 200)
                .map_err(CliError::from_core)?;
            2.0 * fitted
        }
        (None, None) => {
            return Err(CliError::config("q must be given when no model is configured"))
        }
    };

    if cfg.reps > 1 {
        let model = cfg
            .model
            .as_ref()
            .ok_or_else(|| CliError::config("coverage experiments need a model"))?;
        let n = cfg.n.ok_or_else(|| CliError::config("coverage experiments need n"))?;
        let outcome = bands::coverage_experiment(
            model,
            family,
            &window,
            cfg.kappa,
            n,
            cfg.level,
            cfg.reps,
            cfg.seed,
            q,
        )
        .map_err(CliError::from_core)?;
        dir.write_json(
            "coverage.json",
            &CoverageReport {
                config_hash: hash,
                coverage: outcome.coverage,
                reps: outcome.reps,
                m: outcome.m,
                n: outcome.n,
                level: cfg.level,
                q,
                lambda_n: outcome.lambda_n,
                lambda_warning: outcome.lambda_warning,
                in_regime: outcome.in_regime,
            },
        )?;
        return Ok(());
    }

    // single-band mode: simulate or ingest increments
    let (sample, n) = match &cfg.ingest {
        Some(spec) => {
            let sample = read_increments(&spec.csv, &spec.sidecar)?;
            let n = sample.n();
            (sample, n)
        }
        None => {
            let model = cfg
                .model
                .as_ref()
                .ok_or_else(|| CliError::config("band needs a model or ingest files"))?;
            let n = cfg.n.ok_or_else(|| CliError::config("band needs n"))?;
            let t = (n as f64).powf(cfg.kappa);
            let sample = model
                .sample_increments(n, t / n as f64, cfg.seed)
                .map_err(CliError::from_core)?;
            (sample, n)
        }
    };
    let opt = limits::optimal_m(n, cfg.kappa).map_err(CliError::from_core)?;
    let m = cfg.m.unwrap_or(opt.m);
    let lambda_n = m as f64 * (n as f64).ln().sqrt() / (n as f64).powf(cfg.kappa / 2.0);
    let system = BasisSystem::new(family, window, m).map_err(CliError::from_core)?;
    let (c1, c2) = system.boundedness_constants();
    let bias = BiasConstants::new(q, family.order(), c1, c2, &window, cfg.kappa)
        .map_err(CliError::from_core)?;
    let est = estimator::fit(&sample, &system).map_err(CliError::from_core)?;
    let band = bands::confidence_band(
        &est,
        S_FLOOR_DEFAULT,
        &bias,
        cfg.level,
        cfg.grid_points.unwrap_or(256),
    )
    .map_err(CliError::from_core)?;
    dir.write_csv(
        "band.csv",
        "x,lower,estimate,upper",
        (0..band.grid.len())
            .map(|i| vec![band.grid[i], band.lower[i], band.estimate[i], band.upper[i]]),
    )?;
    let regime_warning = (!opt.in_regime)
        .then(|| format!("kappa = {} is outside (4/7, 2/3); proceeding", cfg.kappa));
    dir.write_json(
        "band.json",
        &BandMeta {
            config_hash: hash,
            m,
            n,
            level: cfg.level,
            half_width_scale: band.half_width_scale,
            q,
            lambda_n,
            lambda_warning: lambda_n > 0.5,
            in_regime: opt.in_regime,
            regime_warning,
        },
    )?;
    Ok(())
}

/// Read an increment CSV (single `increment` column, `#` comments ignored)
/// plus its JSON sidecar.
pub fn read_increments(csv: &str, sidecar: &str) -> Result<IncrementSample, CliError> {
    let side_raw = std::fs::read_to_string(sidecar)
        .map_err(|e| CliError::config(format!("cannot read sidecar {sidecar}: {e}")))?;
    let side: IncrementSidecar = serde_json::from_str(&side_raw)
        .map_err(|e| CliError::config(format!("bad sidecar {sidecar}: {e}")))?;
    let body = std::fs::read_to_string(csv)
        .map_err(|e| CliError::config(format!("cannot read increments {csv}: {e}")))?;
    let mut lines = body.lines().filter(|l| !l.starts_with('#') && !l.is_empty());
    match lines.next() {
        Some("increment") => {}
        other => {
            return Err(CliError::config(format!(
                "increment CSV must have a single `increment` column, got header {other:?}"
            )))
        }
    }
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let v: f64 = line
            .trim()
            .parse()
            .map_err(|e| CliError::config(format!("bad increment on data row {}: {e}", i + 1)))?;
        values.push(v);
    }
    if values.len() != side.n {
        return Err(CliError::config(format!(
            "sidecar says n = {}, CSV has {} rows",
            side.n,
            values.len()
        )));
    }
    if !(side.delta > 0.0) {
        return Err(CliError::config("sidecar delta must be positive"));
    }
    Ok(IncrementSample { delta: side.delta, seed: side.seed, values })
}
