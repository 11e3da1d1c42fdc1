//! Suprema of the cell Gaussian processes `Upsilon(x) = sum_j Z_j psi_j(x)`.
//!
//! For a cell of width `delta` the law of `sqrt(delta) * sup` does not depend
//! on `delta`, which the samplers exploit. Two cases have exact laws:
//!
//! - Haar: `sup = (Z_0 + |Z_1|)/sqrt(delta)` (signed) and
//!   `(|Z_0| + |Z_1|)/sqrt(delta)` (absolute);
//! - trigonometric `J = 2` (functions `1, cos, sin`): over the full period the
//!   harmonic pair sweeps every phase, so `sup = (Z_0 + sqrt(2) R)/sqrt(delta)`
//!   with `R` the norm of an independent standard normal pair, and
//!   `sup |.| = (|Z_0| + sqrt(2) R)/sqrt(delta)`.
//!
//! Everything else is sampled on a dense grid of the standard interval.
//!
//! Tail asymptotics: `P{sup >= u} ~ g1 / (sqrt(delta) u)^k * exp(-g2 delta u^2)`
//! as `sqrt(delta) u -> inf`, doubled for the absolute supremum. The constants
//! are expressed through the number of basis functions `N = J + 1`:
//! trigonometric `k = 0, g1 = sqrt(2 sum_{j<=J/2} j^2 / N), g2 = 1/(2N)`
//! (the variance of the cell process is `N/delta`, which pins the exponential
//! rate); Legendre `k = 1, g1 = sqrt(2)(J+1)/sqrt(pi), g2 = 1/(2(J+1)^2)`;
//! Haar `k = 1, g1 = 2/sqrt(pi), g2 = 1/4`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::BasisFamily;
use crate::error::{Error, Result};
use crate::num::{normal, quad, streams};
use rand_distr::{Distribution, StandardNormal};

/// Signed supremum (`sup Upsilon`) or absolute supremum (`sup |Upsilon|`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupMode {
    Signed,
    Absolute,
}

/// Remainder model attached to a tail asymptotic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemainderModel {
    /// Explicit `tau(x) ~ sqrt(N) / (sqrt(2 pi) g1 x)` from the stationary case.
    TrigExplicit,
    /// `tau(x) = O(x^{-2})` with the exact second order known.
    WaveletQuadratic,
    /// No usable form.
    Unknown,
}

/// Leading tail constants `(k, g1, g2)` for one family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailAsymptotic {
    pub family: BasisFamily,
    pub k: u8,
    pub g1: f64,
    pub g2: f64,
    pub remainder: RemainderModel,
}

/// Tail value plus a low-confidence flag set when the asymptotic formula is
/// evaluated outside its regime (`sqrt(delta) u < 3`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailValue {
    pub value: f64,
    pub low_confidence: bool,
}

/// Tail constants of the signed-supremum asymptotic for `family`.
pub fn tail_constants(family: BasisFamily) -> Result<TailAsymptotic> {
    family.validate()?;
    let (k, g1, g2, remainder) = match family {
        BasisFamily::Trigonometric(j) => {
            let n = j as f64 + 1.0;
            let sum_sq: f64 = (1..=(j / 2)).map(|i| (i * i) as f64).sum();
            (0, (2.0 * sum_sq / n).sqrt(), 1.0 / (2.0 * n), RemainderModel::TrigExplicit)
        }
        BasisFamily::Legendre(j) => {
            let n = j as f64 + 1.0;
            (
                1,
                2.0_f64.sqrt() * n / std::f64::consts::PI.sqrt(),
                1.0 / (2.0 * n * n),
                RemainderModel::Unknown,
            )
        }
        BasisFamily::Haar => (
            1,
            2.0 / std::f64::consts::PI.sqrt(),
            0.25,
            RemainderModel::WaveletQuadratic,
        ),
    };
    Ok(TailAsymptotic { family, k, g1, g2, remainder })
}

/// Leading-order tail `P{sup >= u}` at cell width `delta` (doubled for the
/// absolute mode). No remainder term is included.
pub fn asymptotic_tail(family: BasisFamily, delta: f64, u: f64, mode: SupMode) -> Result<TailValue> {
    let tc = tail_constants(family)?;
    let x = delta.sqrt() * u;
    let mut value = tc.g1 / x.powi(tc.k as i32) * (-tc.g2 * delta * u * u).exp();
    if mode == SupMode::Absolute {
        value *= 2.0;
    }
    Ok(TailValue { value, low_confidence: x < 3.0 })
}

/// The same tail in `m`-scale on a window: `h1 m^{k/2} / u^k * exp(-h2 u^2/m)`
/// with `h1 = g1 (b-a)^{-k/2}` and `h2 = g2 (b-a)`.
pub fn m_scale_tail(
    family: BasisFamily,
    window_width: f64,
    m: usize,
    u: f64,
    mode: SupMode,
) -> Result<TailValue> {
    if !(window_width > 0.0) || m == 0 {
        return Err(Error::invalid("m_scale_tail needs positive width and m >= 1"));
    }
    let tc = tail_constants(family)?;
    let h1 = tc.g1 * window_width.powf(-0.5 * tc.k as f64);
    let h2 = tc.g2 * window_width;
    let mf = m as f64;
    let mut value = h1 * mf.powf(0.5 * tc.k as f64) / u.powi(tc.k as i32)
        * (-h2 * u * u / mf).exp();
    if mode == SupMode::Absolute {
        value *= 2.0;
    }
    Ok(TailValue { value, low_confidence: u / mf.sqrt() < 3.0 })
}

/// Stationary-case refinement for the trigonometric family:
/// `sqrt(2c) e^{-delta u^2 / (2N)} + (1 - Phi(u sqrt(delta/N)))` with
/// `N = J + 1` functions and `c = sum_{j<=J/2} j^2 / N`.
pub fn trig_refined_tail(j: u32, delta: f64, u: f64) -> Result<f64> {
    BasisFamily::Trigonometric(j).validate()?;
    let n = j as f64 + 1.0;
    let c: f64 = (1..=(j / 2)).map(|i| (i * i) as f64).sum::<f64>() / n;
    Ok((2.0 * c).sqrt() * (-delta * u * u / (2.0 * n)).exp()
        + normal::sf(u * (delta / n).sqrt()))
}

/// Density of the signed supremum scale variable for the three-function
/// trigonometric system: the law of `(Z_0 + sqrt(2) R)/sqrt(3)`.
pub fn trig_j3_density(x: f64) -> f64 {
    (2.0_f64 / 3.0).sqrt() * x * (-0.5 * x * x).exp() * normal::cdf(2.0_f64.sqrt() * x)
        + (-1.5 * x * x).exp() / (6.0 * std::f64::consts::PI).sqrt()
}

/// Exact signed tail `P{sup >= u}` for the three-function trigonometric
/// system at cell width `delta`, by adaptive quadrature of the density
/// (absolute tolerance 1e-12).
pub fn trig_j3_exact_tail(delta: f64, u: f64) -> f64 {
    let z = u * delta.sqrt() / 3.0_f64.sqrt();
    let hi = z.max(0.0) + 40.0;
    quad::adaptive(&trig_j3_density, z, hi, 1e-12, 60)
}

/// Exact signed Haar tail: `P{(Z_0+|Z_1|)/sqrt(delta) > u} = 1 - Phi^2(w/sqrt(2))`
/// with `w = u sqrt(delta)` (`Z_0 + |Z_1|` is the max of two independent
/// `N(0,2)` variables).
pub fn haar_exact_signed_tail(delta: f64, u: f64) -> f64 {
    let w = u * delta.sqrt();
    let phi = normal::cdf(w / 2.0_f64.sqrt());
    1.0 - phi * phi
}

/// Exact absolute Haar tail: `P{(|Z_0|+|Z_1|)/sqrt(delta) > u} =
/// 1 - (2 Phi(w/sqrt(2)) - 1)^2` via `|Z_0|+|Z_1| = sqrt(2) max(|U|, |V|)`
/// with `U = (Z_0+Z_1)/sqrt(2)`, `V = (Z_0-Z_1)/sqrt(2)` independent.
pub fn haar_exact_absolute_tail(delta: f64, u: f64) -> f64 {
    let w = u * delta.sqrt();
    if w <= 0.0 {
        return 1.0;
    }
    let inner = 2.0 * normal::cdf(w / 2.0_f64.sqrt()) - 1.0;
    1.0 - inner * inner
}

/// Mills-ratio expansion order for [`normal_tail`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailOrder {
    Order0,
    Order2,
}

/// Normal-tail expansion `phi(u)/u` (order 0) or `phi(u)/u (1 - u^{-2})`
/// (order 2). The exact tail is [`normal::sf`].
pub fn normal_tail(u: f64, order: TailOrder) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::domain("normal tail expansion needs u > 0".to_string()));
    }
    let lead = normal::pdf(u) / u;
    Ok(match order {
        TailOrder::Order0 => lead,
        TailOrder::Order2 => lead * (1.0 - 1.0 / (u * u)),
    })
}

/// Configuration for Monte Carlo supremum sampling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupSampleConfig {
    pub family: BasisFamily,
    pub delta: f64,
    /// Grid points per cell for smooth families; ignored by Haar.
    pub grid: usize,
    pub reps: usize,
    pub seed: u64,
    pub mode: SupMode,
}

impl SupSampleConfig {
    fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if self.reps == 0 {
            return Err(Error::invalid("reps must be >= 1"));
        }
        if !(self.delta > 0.0) {
            return Err(Error::invalid("delta must be positive"));
        }
        if !matches!(self.family, BasisFamily::Haar) && self.grid < 256 {
            return Err(Error::invalid("smooth families need grid >= 256"));
        }
        Ok(())
    }
}

/// Draw `reps` suprema of the cell process. Deterministic in `(config)`:
/// replicate `i` draws from substream `i / BATCH` of the seed.
pub fn sample_sup(config: &SupSampleConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let nf = config.family.funcs_per_cell();
    // Basis values over the standard-interval grid, times the rescale factor,
    // laid out grid-major for a cache-friendly inner loop.
    let table = match config.family {
        BasisFamily::Haar => Vec::new(),
        _ => basis_table(config.family, config.grid, config.delta)?,
    };
    let scale = 1.0 / config.delta.sqrt();
    let mode = config.mode;
    let family = config.family;
    let grid = config.grid;
    let mut out = vec![0.0; config.reps];
    out.par_chunks_mut(streams::BATCH as usize)
        .enumerate()
        .for_each(|(bi, chunk)| {
            let mut rng = streams::batch_stream(config.seed, bi as u64);
            let mut z = vec![0.0_f64; nf];
            for v in chunk.iter_mut() {
                for zi in z.iter_mut() {
                    *zi = StandardNormal.sample(&mut rng);
                }
                *v = match family {
                    BasisFamily::Haar => match mode {
                        SupMode::Signed => (z[0] + z[1].abs()) * scale,
                        SupMode::Absolute => (z[0].abs() + z[1].abs()) * scale,
                    },
                    _ => grid_sup(&table, &z, grid, nf, mode),
                };
            }
        });
    Ok(out)
}

/// Exact sampler for the three-function trigonometric cell (`J = 2`).
pub fn sample_trig_pair_sup_exact(
    delta: f64,
    reps: usize,
    seed: u64,
    mode: SupMode,
) -> Vec<f64> {
    let scale = 1.0 / delta.sqrt();
    let mut out = vec![0.0; reps];
    out.par_chunks_mut(streams::BATCH as usize)
        .enumerate()
        .for_each(|(bi, chunk)| {
            let mut rng = streams::batch_stream(seed, bi as u64);
            for v in chunk.iter_mut() {
                let z0: f64 = StandardNormal.sample(&mut rng);
                let z1: f64 = StandardNormal.sample(&mut rng);
                let z2: f64 = StandardNormal.sample(&mut rng);
                let r = (z1 * z1 + z2 * z2).sqrt();
                let head = match mode {
                    SupMode::Signed => z0,
                    SupMode::Absolute => z0.abs(),
                };
                *v = (head + 2.0_f64.sqrt() * r) * scale;
            }
        });
    out
}

/// Suprema of the normalized Legendre process
/// `c * sum_j sqrt((2j+1)/2) P_j(x) Z_j` on `[-1, 1]` with `c = sqrt(2)/(J+1)`
/// (unit maximal variance, attained at the endpoints). The grid includes both
/// endpoints.
pub fn sample_legendre_normalized_sup(
    j: u32,
    grid: usize,
    reps: usize,
    seed: u64,
    mode: SupMode,
) -> Result<Vec<f64>> {
    if grid < 256 {
        return Err(Error::invalid("legendre sampling needs grid >= 256"));
    }
    let nf = j as usize + 1;
    let c = 2.0_f64.sqrt() / (j as f64 + 1.0);
    let mut table = vec![0.0; grid * nf];
    for g in 0..grid {
        let x = -1.0 + 2.0 * g as f64 / (grid - 1) as f64;
        let mut p0 = 1.0;
        let mut p1 = x;
        for (jj, slot) in table[g * nf..(g + 1) * nf].iter_mut().enumerate() {
            let v = match jj {
                0 => 1.0,
                1 => x,
                _ => {
                    let jf = jj as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                    p2
                }
            };
            *slot = c * ((2.0 * jj as f64 + 1.0) / 2.0).sqrt() * v;
        }
    }
    let mut out = vec![0.0; reps];
    out.par_chunks_mut(streams::BATCH as usize)
        .enumerate()
        .for_each(|(bi, chunk)| {
            let mut rng = streams::batch_stream(seed, bi as u64);
            let mut z = vec![0.0; nf];
            for v in chunk.iter_mut() {
                for zi in z.iter_mut() {
                    *zi = StandardNormal.sample(&mut rng);
                }
                *v = grid_sup(&table, &z, grid, nf, mode);
            }
        });
    Ok(out)
}

fn grid_sup(table: &[f64], z: &[f64], grid: usize, nf: usize, mode: SupMode) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for g in 0..grid {
        let row = &table[g * nf..g * nf + nf];
        let mut acc = 0.0;
        for (r, zi) in row.iter().zip(z) {
            acc += r * zi;
        }
        let val = match mode {
            SupMode::Signed => acc,
            SupMode::Absolute => acc.abs(),
        };
        if val > best {
            best = val;
        }
    }
    best
}

/// Basis values over the standard-interval grid, scaled so a row dotted with
/// the normal vector gives `Upsilon` at that grid point.
fn basis_table(family: BasisFamily, grid: usize, delta: f64) -> Result<Vec<f64>> {
    let nf = family.funcs_per_cell();
    let (at, bt) = family.standard_interval();
    let mut table = vec![0.0; grid * nf];
    let scale = ((bt - at) / delta).sqrt();
    for g in 0..grid {
        // trig: periodic half-open grid; Legendre: closed grid with endpoints
        let t = match family {
            BasisFamily::Trigonometric(_) => at + (bt - at) * g as f64 / grid as f64,
            _ => at + (bt - at) * g as f64 / (grid - 1) as f64,
        };
        for (j, slot) in table[g * nf..(g + 1) * nf].iter_mut().enumerate() {
            *slot = scale * family.standard_eval(j, t)?;
        }
    }
    Ok(table)
}

/// Empirical tail `P{draw > u}` with its binomial standard error.
pub fn empirical_tail(draws: &[f64], u: f64) -> (f64, f64) {
    let n = draws.len() as f64;
    let hits = draws.iter().filter(|v| **v > u).count() as f64;
    let p = hits / n;
    (p, (p * (1.0 - p) / n).sqrt())
}
