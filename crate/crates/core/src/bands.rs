//! Uniform confidence bands for the Lévy density on the window, built by
//! inverting the Gumbel limit of the maximal deviation, plus coverage
//! experiments at simulation scale.

use serde::{Deserialize, Serialize};

use crate::basis::{BasisFamily, BasisSystem, Window};
use crate::error::{Error, Result};
use crate::estimator::{self, DeviationMode, ProjectionEstimate};
use crate::levy::LevyModel;
use crate::limits::{self, BiasConstants};

/// Floor for the plug-in density inside band widths.
pub const S_FLOOR_DEFAULT: f64 = 1e-6;

/// A confidence band on a grid of the window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfidenceBand {
    pub grid: Vec<f64>,
    pub estimate: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: f64,
    /// `sqrt(m/T) * (u_m(y_level) + shift)` — the width in units of `sqrt(s)`.
    pub half_width_scale: f64,
}

/// Quantile of the limit law: `gumbel_cdf(y) = level` at
/// `y = -ln(-ln(level)/2)`.
pub fn gumbel_quantile(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("level must be in (0,1), got {level}")));
    }
    Ok(-(-level.ln() / 2.0).ln())
}

/// Build the band `s_hat -/+ sqrt(max(s_hat, eps)) * half_width_scale` with
/// the lower edge clipped at 0.
///
/// The horizon of `est` must satisfy `T = n^kappa` for the `kappa` recorded
/// in `bias` (relative tolerance 1e-9); the threshold `u_m` comes from the
/// normalization of the estimate's own basis family, and the shift from the
/// bias constants.
pub fn confidence_band(
    est: &ProjectionEstimate,
    s_floor: f64,
    bias: &BiasConstants,
    level: f64,
    grid_points: usize,
) -> Result<ConfidenceBand> {
    let y = gumbel_quantile(level)?;
    let t = est.horizon();
    let expect_t = (est.n as f64).powf(bias.kappa);
    if ((t - expect_t) / expect_t).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "horizon T = {t} is not n^kappa = {expect_t} for kappa = {}",
            bias.kappa
        )));
    }
    let system = &est.system;
    let params = limits::normalization(system.family(), &system.window(), system.m())?;
    let shift = limits::bias_shift(est.n, system.m(), bias.kappa, bias)?;
    let scale = (system.m() as f64 / t).sqrt() * (params.threshold_u(y) + shift);
    let k = grid_points.max(2 * system.dim()).max(64);
    let w = system.window();
    let mut grid = Vec::with_capacity(k + 1);
    let mut estimate = Vec::with_capacity(k + 1);
    let mut lower = Vec::with_capacity(k + 1);
    let mut upper = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let x = w.a() + w.width() * i as f64 / k as f64;
        let v = est.evaluate(x)?;
        let half = v.max(s_floor).sqrt() * scale;
        grid.push(x);
        estimate.push(v);
        lower.push((v - half).max(0.0));
        upper.push(v + half);
    }
    Ok(ConfidenceBand { grid, estimate, lower, upper, level, half_width_scale: scale })
}

/// Outcome of a coverage experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageOutcome {
    pub coverage: f64,
    pub reps: usize,
    pub m: usize,
    pub n: usize,
    pub lambda_n: f64,
    pub half_width_scale: f64,
    pub in_regime: bool,
    pub lambda_warning: bool,
}

/// Fraction of replications whose true-weighted deviation
/// `sup |s_hat - s| / sqrt(s)` stays below the band scale
/// `sqrt(m/T) (u_m(y_level) + shift)`.
///
/// `m` is set to `optimal_m(n, kappa)`; the design constraint
/// `Lambda_n = m sqrt(ln n) / n^{kappa/2}` is reported, warned about above
/// 0.5, and refused above 2.0.
#[allow(clippy::too_many_arguments)]
pub fn coverage_experiment(
    model: &LevyModel,
    family: BasisFamily,
    window: &Window,
    kappa: f64,
    n: usize,
    level: f64,
    reps: usize,
    seed: u64,
    q: f64,
) -> Result<CoverageOutcome> {
    if reps == 0 {
        return Err(Error::invalid("coverage experiment needs reps >= 1"));
    }
    let opt = limits::optimal_m(n, kappa)?;
    let m = opt.m;
    let lambda_n = m as f64 * (n as f64).ln().sqrt() / (n as f64).powf(kappa / 2.0);
    if lambda_n > 2.0 {
        return Err(Error::invalid(format!(
            "design constraint violated: Lambda_n = {lambda_n:.3} > 2.0 (m too large for n)"
        )));
    }
    let system = BasisSystem::new(family, *window, m)?;
    let (c1, c2) = system.boundedness_constants();
    let bias = BiasConstants::new(q, family.order(), c1, c2, window, kappa)?;
    let params = limits::normalization(family, window, m)?;
    let y = gumbel_quantile(level)?;
    let t = (n as f64).powf(kappa);
    let delta = t / n as f64;
    let shift = limits::bias_shift(n, m, kappa, &bias)?;
    let scale = (m as f64 / t).sqrt() * (params.threshold_u(y) + shift);
    let mut covered = 0usize;
    for r in 0..reps {
        let sample = model.sample_increments(n, delta, seed.wrapping_add(r as u64))?;
        let est = estimator::fit(&sample, &system)?;
        let rep = estimator::deviation_stat(
            &est,
            &|x| model.levy_density(x).unwrap(),
            &|x| model.levy_density(x).unwrap(),
            16 * system.dim(),
            DeviationMode::AgainstTruth,
        )?;
        if rep.statistic <= scale {
            covered += 1;
        }
    }
    Ok(CoverageOutcome {
        coverage: covered as f64 / reps as f64,
        reps,
        m,
        n,
        lambda_n,
        half_width_scale: scale,
        in_regime: opt.in_regime,
        lambda_warning: lambda_n > 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::normalization;

    #[test]
    fn gumbel_quantile_round_trip() {
        assert!(gumbel_quantile(1.0).is_err());
        assert!(gumbel_quantile(0.0).is_err());
        let y = gumbel_quantile((-2.0_f64).exp()).unwrap();
        assert!(y.abs() < 1e-12);
        let y9 = gumbel_quantile(0.9).unwrap();
        assert!((y9 - 2.9435145078723906).abs() < 1e-10);
        for p in [0.5, 0.9, 0.99] {
            let y = gumbel_quantile(p).unwrap();
            assert!((limits::gumbel_cdf(y) - p).abs() < 1e-12);
        }
    }

    fn demo_estimate() -> (ProjectionEstimate, BiasConstants) {
        let model = LevyModel::GammaProcess { shape_rate: 1.0, exp_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let kappa = 0.6;
        let n = 10_000usize;
        let t = (n as f64).powf(kappa);
        let sys = BasisSystem::new(BasisFamily::Haar, w, 6).unwrap();
        let sample = model.sample_increments(n, t / n as f64, 400).unwrap();
        let est = estimator::fit(&sample, &sys).unwrap();
        let (c1, c2) = sys.boundedness_constants();
        let bias = BiasConstants::new(0.3, 1, c1, c2, &w, kappa).unwrap();
        (est, bias)
    }

    #[test]
    fn band_widens_with_level_and_shift() {
        let (est, bias) = demo_estimate();
        let b80 = confidence_band(&est, S_FLOOR_DEFAULT, &bias, 0.80, 128).unwrap();
        let b95 = confidence_band(&est, S_FLOOR_DEFAULT, &bias, 0.95, 128).unwrap();
        let b999 = confidence_band(&est, S_FLOOR_DEFAULT, &bias, 0.999, 128).unwrap();
        assert!(b95.half_width_scale > b80.half_width_scale);
        assert!(b999.half_width_scale > b95.half_width_scale);
        // nested bands pointwise
        for i in 0..b80.grid.len() {
            assert!(b95.lower[i] <= b80.lower[i] + 1e-12);
            assert!(b95.upper[i] >= b80.upper[i] - 1e-12);
            assert!(b80.lower[i] >= 0.0);
            assert!(b80.lower[i] <= b80.upper[i]);
        }
        // a larger shift strictly widens
        let mut bias_wide = bias;
        bias_wide.brevec *= 2.0;
        let wide = confidence_band(&est, S_FLOOR_DEFAULT, &bias_wide, 0.80, 128).unwrap();
        assert!(wide.half_width_scale > b80.half_width_scale);
    }

    #[test]
    fn band_rejects_inconsistent_horizon() {
        let (est, bias) = demo_estimate();
        let mut wrong = est.clone();
        wrong.delta *= 1.5;
        assert!(confidence_band(&wrong, S_FLOOR_DEFAULT, &bias, 0.9, 64).is_err());
    }

    #[test]
    fn band_rejects_normalization_guard() {
        // m = 2 with Haar h1: h1 m < e
        let model = LevyModel::GammaProcess { shape_rate: 1.0, exp_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let kappa = 0.6;
        let n = 10_000usize;
        let t = (n as f64).powf(kappa);
        let sys = BasisSystem::new(BasisFamily::Haar, w, 2).unwrap();
        let sample = model.sample_increments(n, t / n as f64, 1).unwrap();
        let est = estimator::fit(&sample, &sys).unwrap();
        let bias = BiasConstants::new(0.3, 1, 1.0, 2.0, &w, kappa).unwrap();
        assert!(confidence_band(&est, S_FLOOR_DEFAULT, &bias, 0.9, 64).is_err());
    }

    #[test]
    fn surrogate_noncoverage_near_nominal() {
        // Gaussian surrogate, shift = 0: non-coverage at level 0.9 is 0.1 +- 0.04
        // for m = 1000 (trigonometric three-function cell, exact draws)
        let w = Window::new(1e-9, 1.0).unwrap();
        let m = 1000usize;
        let params = normalization(BasisFamily::Trigonometric(2), &w, m).unwrap();
        let y = gumbel_quantile(0.9).unwrap();
        let threshold = params.threshold_u(y);
        let reps = 4000;
        let draws =
            limits::surrogate_max_draws(BasisFamily::Trigonometric(2), m, reps, 505, 0).unwrap();
        let miss = draws.iter().filter(|v| **v > threshold).count() as f64 / reps as f64;
        assert!((miss - 0.1).abs() < 0.04, "non-coverage {miss}");
    }

    #[test]
    fn coverage_experiment_smoke() {
        // small-n smoke run: outcome is a fraction, metadata consistent
        let model = LevyModel::GammaProcess { shape_rate: 1.0, exp_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let out = coverage_experiment(
            &model,
            BasisFamily::Haar,
            &w,
            0.6,
            3000,
            0.99,
            20,
            11,
            0.3,
        )
        .unwrap();
        assert!(out.coverage >= 0.0 && out.coverage <= 1.0);
        assert_eq!(out.m, limits::optimal_m(3000, 0.6).unwrap().m);
        // nested levels on common seeds
        let lo = coverage_experiment(
            &model,
            BasisFamily::Haar,
            &w,
            0.6,
            3000,
            0.80,
            20,
            11,
            0.3,
        )
        .unwrap();
        assert!(out.coverage >= lo.coverage);
    }

    #[test]
    fn coverage_increases_with_n() {
        // paired replications along kappa = 0.6
        let model = LevyModel::GammaProcess { shape_rate: 1.0, exp_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let reps = 200;
        let small = coverage_experiment(
            &model,
            BasisFamily::Haar,
            &w,
            0.6,
            10_000,
            0.9,
            reps,
            2026,
            0.2973496169239587,
        )
        .unwrap();
        let large = coverage_experiment(
            &model,
            BasisFamily::Haar,
            &w,
            0.6,
            100_000,
            0.9,
            reps,
            2026,
            0.2973496169239587,
        )
        .unwrap();
        assert!(
            large.coverage >= small.coverage,
            "coverage fell: {} -> {}",
            small.coverage,
            large.coverage
        );
    }
}
