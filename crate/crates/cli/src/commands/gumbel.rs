//! `gumbel`: for each `m`, draw maxima of `m` cell suprema, tabulate the
//! empirical law against the Gumbel limit (and the accompanying laws for the
//! trigonometric family), and report KS / Lévy distances.

use std::path::Path;

use levyband_core::basis::BasisFamily;
use levyband_core::limits::{
    self, accompanying_cdf, accompanying_shifted, gumbel_cdf, kolmogorov_distance,
    levy_distance, BiasConstants, GridCdf, ShiftSign,
};
use serde::Serialize;

use crate::config::{GumbelConfig, YGridSpec};
use crate::output::{config_hash, OutDir};
use crate::{parse, CliError};

#[derive(Serialize)]
struct DistanceRow {
    m: usize,
    ks_gumbel: f64,
    levy_gumbel: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ks_accompanying: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    levy_accompanying: Option<f64>,
}

#[derive(Serialize)]
struct DistanceReport {
    config_hash: String,
    reps: usize,
    rows: Vec<DistanceRow>,
}

pub fn run(raw: &str, seed_override: Option<u64>, out: &Path) -> Result<(), CliError> {
    let mut cfg: GumbelConfig = parse(raw)?;
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    if cfg.m_list.is_empty() {
        return Err(CliError::config("m_list must not be empty"));
    }
    if cfg.reps == 0 {
        return Err(CliError::config("reps must be >= 1"));
    }
    let family = cfg.family.resolve()?;
    let window = cfg.window.resolve()?;
    let j_trig = match family {
        BasisFamily::Trigonometric(j) => Some(j),
        _ => None,
    };
    if cfg.accompanying {
        let Some(j) = j_trig else {
            return Err(CliError::config(
                "accompanying laws are defined for the trigonometric family only",
            ));
        };
        if (j as f64) < window.width() {
            return Err(CliError::config(format!(
                "accompanying law requires J >= window width ({} < {})",
                j,
                window.width()
            )));
        }
    }
    let ygrid = cfg.y_grid.clone().unwrap_or_default();
    let YGridSpec { min: y_min, max: y_max, points } = ygrid;
    if points < 2 || !(y_max > y_min) {
        return Err(CliError::config("y_grid must have points >= 2 and max > min"));
    }
    let grid = cfg.grid.unwrap_or(1024);

    let hash = config_hash(&cfg);
    let dir = OutDir::new(out, hash.clone())?;
    let mut rows = Vec::new();
    for (mi, &m) in cfg.m_list.iter().enumerate() {
        let params =
            limits::normalization(family, &window, m).map_err(CliError::from_core)?;
        let draws = limits::surrogate_max_draws(
            family,
            m,
            cfg.reps,
            cfg.seed.wrapping_add(mi as u64),
            grid,
        )
        .map_err(CliError::from_core)?;
        // empirical CDF in y-coordinates on the reporting grid
        let mut ys_sorted: Vec<f64> = draws.iter().map(|v| params.y_of_u(*v)).collect();
        ys_sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let ys: Vec<f64> =
            (0..points).map(|i| y_min + (y_max - y_min) * i as f64 / (points - 1) as f64).collect();
        let nf = ys_sorted.len() as f64;
        let emp: Vec<f64> = ys
            .iter()
            .map(|&y| ys_sorted.partition_point(|v| *v <= y) as f64 / nf)
            .collect();

        let bias = match (&cfg.shift, j_trig) {
            (Some(s), Some(j)) if cfg.accompanying => {
                use levyband_core::basis::BasisSystem;
                let sys = BasisSystem::new(family, window, m).map_err(CliError::from_core)?;
                let (c1, c2) = sys.boundedness_constants();
                Some((
                    BiasConstants::new(s.q, j, c1, c2, &window, s.kappa)
                        .map_err(CliError::from_core)?,
                    s.n,
                    s.kappa,
                ))
            }
            _ => None,
        };

        let mut table_rows = Vec::with_capacity(points);
        let mut am_vals = Vec::with_capacity(points);
        for (i, &y) in ys.iter().enumerate() {
            let g = gumbel_cdf(y);
            let (am, am_lo, am_hi) = if cfg.accompanying {
                let j = j_trig.unwrap();
                let a = accompanying_cdf(j, &window, m, y).map_err(CliError::from_core)?;
                let (lo, hi) = match &bias {
                    Some((b, n, kappa)) => (
                        accompanying_shifted(j, &window, m, y, *n, *kappa, b, ShiftSign::Minus)
                            .map_err(CliError::from_core)?,
                        accompanying_shifted(j, &window, m, y, *n, *kappa, b, ShiftSign::Plus)
                            .map_err(CliError::from_core)?,
                    ),
                    None => (a, a),
                };
                (a, lo, hi)
            } else {
                (f64::NAN, f64::NAN, f64::NAN)
            };
            am_vals.push(am);
            table_rows.push(vec![y, emp[i], g, am, am_lo, am_hi]);
        }
        dir.write_csv(
            &format!("law_table_m{m}.csv"),
            "y,empirical,gumbel,a_m,a_m_minus,a_m_plus",
            table_rows.into_iter(),
        )?;

        let emp_cdf = GridCdf::new(ys.clone(), emp.clone()).map_err(CliError::from_core)?;
        let gum_cdf = GridCdf::from_fn(ys.clone(), gumbel_cdf).map_err(CliError::from_core)?;
        let (ks_a, levy_a) = if cfg.accompanying {
            let am_cdf =
                GridCdf::new(ys.clone(), am_vals.clone()).map_err(CliError::from_core)?;
            (
                Some(kolmogorov_distance(&emp_cdf, &am_cdf)),
                Some(levy_distance(&emp_cdf, &am_cdf)),
            )
        } else {
            (None, None)
        };
        rows.push(DistanceRow {
            m,
            ks_gumbel: kolmogorov_distance(&emp_cdf, &gum_cdf),
            levy_gumbel: levy_distance(&emp_cdf, &gum_cdf),
            ks_accompanying: ks_a,
            levy_accompanying: levy_a,
        });
    }
    dir.write_json(
        "distances.json",
        &DistanceReport { config_hash: hash, reps: cfg.reps, rows },
    )?;
    Ok(())
}
