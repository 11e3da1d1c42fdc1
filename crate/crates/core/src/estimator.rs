//! The projection estimator `s_hat(x) = sum_r beta_hat(phi_r) phi_r(x)` with
//! `beta_hat(phi_r) = (1/(n Delta)) sum_k phi_r(X_k)`, its exact expectation
//! under a model, the projected truth, and the weighted sup-deviation
//! statistics.

use serde::{Deserialize, Serialize};

use crate::basis::{BasisFamily, BasisSystem};
use crate::error::{Error, Result};
use crate::levy::{IncrementSample, LevyModel};
use crate::num::kahan::Neumaier;
use crate::num::quad;

/// Coefficient vector of a fitted projection estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionEstimate {
    pub system: BasisSystem,
    pub coeffs: Vec<f64>,
    pub n: usize,
    pub delta: f64,
}

impl ProjectionEstimate {
    /// Observation horizon `T = n * Delta`.
    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.delta
    }

    /// Evaluate the estimate at `x` in the window; only the `J+1` functions
    /// of the cell containing `x` contribute.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        evaluate_coeffs(&self.system, &self.coeffs, x)
    }
}

/// Evaluate `sum_r c_r phi_r(x)` for a coefficient vector on a system.
pub fn evaluate_coeffs(system: &BasisSystem, coeffs: &[f64], x: f64) -> Result<f64> {
    if !system.window().contains(x) {
        return Err(Error::domain(format!(
            "x = {x} outside window [{}, {}]",
            system.window().a(),
            system.window().b()
        )));
    }
    let nf = system.family().funcs_per_cell();
    let mut vals = [0.0; 16];
    let vals = &mut vals[..nf];
    let p = system.cell_eval(x, vals).expect("window membership checked");
    let base = system.flat_index(p, 0);
    Ok(vals
        .iter()
        .zip(&coeffs[base..base + nf])
        .map(|(v, c)| v * c)
        .sum())
}

/// Empirical coefficients `beta_hat(phi_r)`; increments outside the window
/// contribute nothing. Accumulation is compensated so that any summation
/// order agrees to ~1e-12.
pub fn estimate_coefficients(sample: &IncrementSample, system: &BasisSystem) -> Result<Vec<f64>> {
    if sample.values.is_empty() {
        return Err(Error::invalid("empty increment sample"));
    }
    let nf = system.family().funcs_per_cell();
    let mut acc: Vec<Neumaier> = vec![Neumaier::new(); system.dim()];
    let mut vals = vec![0.0; nf];
    for &x in &sample.values {
        if let Some(p) = system.cell_eval(x, &mut vals) {
            let base = system.flat_index(p, 0);
            for (j, v) in vals.iter().enumerate() {
                acc[base + j].add(*v);
            }
        }
    }
    let scale = 1.0 / (sample.n() as f64 * sample.delta);
    Ok(acc.iter().map(|a| a.value() * scale).collect())
}

/// Fit a [`ProjectionEstimate`] from a sample.
pub fn fit(sample: &IncrementSample, system: &BasisSystem) -> Result<ProjectionEstimate> {
    Ok(ProjectionEstimate {
        system: system.clone(),
        coeffs: estimate_coefficients(sample, system)?,
        n: sample.n(),
        delta: sample.delta,
    })
}

/// Coefficients of the `L^2` projection of `f` onto the system's span:
/// `beta_r = int phi_r f`, cellwise adaptive quadrature (1e-10 absolute).
pub fn projection_coefficients(
    system: &BasisSystem,
    f: &dyn Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    let nf = system.family().funcs_per_cell();
    let m = system.m();
    let delta = system.delta();
    let a = system.window().a();
    let mut coeffs = vec![0.0; system.dim()];
    for p in 0..m {
        let lo = a + delta * p as f64;
        for j in 0..nf {
            let integrand = |x: f64| {
                let v = system.global_eval(j, p + 1, x.min(system.window().b())).unwrap_or(0.0);
                v * f(x)
            };
            coeffs[system.flat_index(p, j)] =
                quad::adaptive(&integrand, lo, lo + delta, 1e-10, 50);
        }
    }
    Ok(coeffs)
}

/// Projected truth `s~ = sum_r (int phi_r s) phi_r` for a model.
pub fn projection_truth(model: &LevyModel, system: &BasisSystem) -> Result<Vec<f64>> {
    let m = *model;
    projection_coefficients(system, &move |x| m.levy_density(x).unwrap_or(0.0))
}

/// Expected-estimator coefficients `(1/Delta) int phi_r p_Delta`; together
/// with [`evaluate_coeffs`] this is the exact centering function `E s_hat`.
/// The compound Poisson atom at 0 never contributes because the window
/// excludes 0.
pub fn expected_estimate(
    model: &LevyModel,
    system: &BasisSystem,
    delta: f64,
) -> Result<Vec<f64>> {
    if !(delta > 0.0) {
        return Err(Error::invalid("expected_estimate needs delta > 0"));
    }
    let m = *model;
    let mut coeffs =
        projection_coefficients(system, &move |x| m.transition_density(delta, x))?;
    for c in coeffs.iter_mut() {
        *c /= delta;
    }
    Ok(coeffs)
}

/// Which reference the deviation is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationMode {
    /// `sup |s_hat - s| / sqrt(s)` — deviation from the truth.
    AgainstTruth,
    /// `sup |s_hat - E s_hat| / sqrt(s)` — deviation from the expectation.
    AgainstExpectation,
}

/// Result of a sup-deviation scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub statistic: f64,
    pub argmax_x: f64,
    pub grid: usize,
    pub mode: DeviationMode,
}

/// Weighted sup deviation `max_x |est(x) - reference(x)| / sqrt(s(x))`.
///
/// The scan grid is aligned to half-cell boundaries (exact for Haar, whose
/// pieces are half cells) and refined by doubling until the statistic moves
/// by less than 1e-6 relative. `s` must stay strictly positive on the grid.
pub fn deviation_stat(
    est: &ProjectionEstimate,
    reference: &dyn Fn(f64) -> f64,
    s: &dyn Fn(f64) -> f64,
    grid: usize,
    mode: DeviationMode,
) -> Result<DeviationReport> {
    let system = &est.system;
    let window = system.window();
    let min_grid = 16 * system.m() * system.family().funcs_per_cell();
    let pieces = 2 * system.m(); // half-cell alignment
    let mut k = grid.max(min_grid).div_ceil(pieces).max(2) * pieces;
    let mut prev: Option<f64> = None;
    let exact_haar = matches!(system.family(), BasisFamily::Haar);
    loop {
        let mut best = f64::NEG_INFINITY;
        let mut best_x = window.a();
        for i in 0..=k {
            let x = window.a() + window.width() * i as f64 / k as f64;
            let sx = s(x);
            if !(sx > 0.0) {
                return Err(Error::invalid(format!(
                    "weight s(x) must be positive on the grid; s({x}) = {sx}"
                )));
            }
            let v = (est.evaluate(x)? - reference(x)).abs() / sx.sqrt();
            if v > best {
                best = v;
                best_x = x;
            }
        }
        let done = match prev {
            Some(p) => (best - p).abs() <= 1e-6 * best.abs().max(1e-300),
            None => exact_haar && k >= min_grid,
        };
        if done || k > (1 << 22) {
            return Ok(DeviationReport { statistic: best, argmax_x: best_x, grid: k, mode });
        }
        prev = Some(best);
        k *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{BasisFamily, Window};
    use crate::num::expint;

    fn w01() -> Window {
        Window::new(1e-12, 1.0).unwrap()
    }

    #[test]
    fn coefficients_hand_example() {
        // increments [0.5, 2.0, 0.3], delta = 0.1, Haar m=1 on [0,1], j=0:
        // two in-window hits of phi_0 = 1 over n*delta = 0.3
        let sample = IncrementSample { delta: 0.1, seed: 0, values: vec![0.5, 2.0, 0.3] };
        let sys = BasisSystem::new(BasisFamily::Haar, w01(), 1).unwrap();
        let beta = estimate_coefficients(&sample, &sys).unwrap();
        assert!((beta[0] - 2.0 / 0.3).abs() < 1e-9);
        // the wavelet coefficient: 0.5 -> +1, 0.3 -> -1
        assert!(beta[1].abs() < 1e-9);
    }

    #[test]
    fn all_increments_outside_window_give_zero() {
        let sample = IncrementSample { delta: 0.5, seed: 0, values: vec![2.0, 3.0, -1.0] };
        let sys = BasisSystem::new(BasisFamily::Trigonometric(2), w01(), 4).unwrap();
        let beta = estimate_coefficients(&sample, &sys).unwrap();
        assert!(beta.iter().all(|b| *b == 0.0));
        let empty = IncrementSample { delta: 0.5, seed: 0, values: vec![] };
        assert!(estimate_coefficients(&empty, &sys).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let sys = BasisSystem::new(BasisFamily::Haar, w01(), 1).unwrap();
        // coeffs (1,1): s_hat(0.75) = 1 + 1 = 2, s_hat(0.25) = 1 - 1 = 0
        let est = ProjectionEstimate { system: sys, coeffs: vec![1.0, 1.0], n: 1, delta: 1.0 };
        assert!((est.evaluate(0.75).unwrap() - 2.0).abs() < 1e-12);
        assert!(est.evaluate(0.25).unwrap().abs() < 1e-12);
        assert!(est.evaluate(1.5).is_err());
        // constant basis: J=0, beta_0 = 2 -> s_hat = 2 everywhere
        let sys = BasisSystem::new(BasisFamily::Legendre(0), w01(), 1).unwrap();
        let est = ProjectionEstimate { system: sys, coeffs: vec![2.0], n: 1, delta: 1.0 };
        for i in 0..10 {
            let x = 0.05 + 0.09 * i as f64;
            assert!((est.evaluate(x).unwrap() - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn coefficient_mean_matches_window_integral() {
        // CP lambda=2, eta=1: beta_0 -> int phi_0 s + O(Delta) on [0.5, 1.5]
        let model = LevyModel::CompoundPoissonExp { intensity: 2.0, jump_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let sys = BasisSystem::new(BasisFamily::Legendre(0), w, 1).unwrap();
        let n = 1_000_000;
        let delta = 1e-3;
        let sample = model.sample_increments(n, delta, 2024).unwrap();
        let beta = estimate_coefficients(&sample, &sys).unwrap();
        let target = 2.0 * ((-0.5_f64).exp() - (-1.5_f64).exp());
        // 4 MC standard errors of the coefficient estimator
        let var = target / (n as f64 * delta); // ~ Poisson count variance scale
        let se = var.sqrt();
        assert!(
            (beta[0] - target).abs() < 4.0 * se + 0.01 * target,
            "beta {} vs {target}",
            beta[0]
        );
    }

    #[test]
    fn projection_reproduces_functions_in_span() {
        // constants lie in every family's span
        for fam in [BasisFamily::Haar, BasisFamily::Trigonometric(2), BasisFamily::Legendre(1)] {
            let sys = BasisSystem::new(fam, w01(), 4).unwrap();
            let coeffs = projection_coefficients(&sys, &|_| 3.0).unwrap();
            for i in 1..40 {
                let x = i as f64 / 41.0;
                let v = evaluate_coeffs(&sys, &coeffs, x).unwrap();
                assert!((v - 3.0).abs() < 1e-8, "{fam:?} at {x}: {v}");
            }
        }
        // linear functions lie in the Legendre J>=1 span
        let sys = BasisSystem::new(BasisFamily::Legendre(1), w01(), 1).unwrap();
        let coeffs = projection_coefficients(&sys, &|x| x).unwrap();
        for i in 1..40 {
            let x = i as f64 / 41.0;
            assert!((evaluate_coeffs(&sys, &coeffs, x).unwrap() - x).abs() < 1e-8);
        }
    }

    #[test]
    fn projection_truth_gamma_haar_cell_coefficient() {
        // first Haar cell on [0.5, 1.5] with m=2: beta = int_{0.5}^{1} s / sqrt(0.5),
        // s = e^{-x}/x, integral = E1(0.5) - E1(1)
        let model = LevyModel::GammaProcess { shape_rate: 1.0, exp_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let sys = BasisSystem::new(BasisFamily::Haar, w, 2).unwrap();
        let coeffs = projection_truth(&model, &sys).unwrap();
        let want = (expint::e1(0.5) - expint::e1(1.0)) / 0.5_f64.sqrt();
        assert!((coeffs[0] - want).abs() < 1e-9, "{} vs {want}", coeffs[0]);
    }

    #[test]
    fn expected_estimate_constant_basis_reduction() {
        // constant basis: coefficient = (1/Delta) P{X_Delta in [a,b]} / sqrt(b-a)
        let model = LevyModel::GammaProcess { shape_rate: 1.0, exp_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let sys = BasisSystem::new(BasisFamily::Legendre(0), w, 1).unwrap();
        let delta = 0.05;
        let coeffs = expected_estimate(&model, &sys, delta).unwrap();
        let p = model.transition_tail(delta, 0.5).unwrap()
            - model.transition_tail(delta, 1.5).unwrap();
        let want = p / delta / 1.0_f64.sqrt();
        assert!((coeffs[0] - want).abs() < 1e-8, "{} vs {want}", coeffs[0]);
    }

    #[test]
    fn expected_estimate_converges_to_projection_truth() {
        // sup |E s_hat - s~| decreasing as Delta -> 0 (Gamma model)
        let model = LevyModel::GammaProcess { shape_rate: 1.0, exp_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let sys = BasisSystem::new(BasisFamily::Haar, w, 4).unwrap();
        let truth = projection_truth(&model, &sys).unwrap();
        let sup_gap = |delta: f64| {
            let e = expected_estimate(&model, &sys, delta).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..400 {
                let x = 0.5 + 1.0 * (i as f64 + 0.5) / 400.0;
                let gap = (evaluate_coeffs(&sys, &e, x).unwrap()
                    - evaluate_coeffs(&sys, &truth, x).unwrap())
                .abs();
                worst = worst.max(gap);
            }
            worst
        };
        let (g2, g3, g4) = (sup_gap(1e-2), sup_gap(1e-3), sup_gap(1e-4));
        assert!(g3 < g2 && g4 < g3, "gaps {g2} {g3} {g4}");
    }

    #[test]
    fn expected_estimate_matches_mc_average() {
        // E s_hat from quadrature vs the average of 200 fitted estimates
        let model = LevyModel::CompoundPoissonExp { intensity: 1.0, jump_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let sys = BasisSystem::new(BasisFamily::Haar, w, 4).unwrap();
        let delta = 1e-3;
        let n = 20_000;
        let reps = 200;
        let expected = expected_estimate(&model, &sys, delta).unwrap();
        let mut mean = vec![0.0; 17];
        let xs: Vec<f64> = (0..17).map(|i| 0.5 + (i as f64 + 0.5) / 17.0).collect();
        for r in 0..reps {
            let sample = model.sample_increments(n, delta, 9_000 + r).unwrap();
            let est = fit(&sample, &sys).unwrap();
            for (slot, &x) in mean.iter_mut().zip(&xs) {
                *slot += est.evaluate(x).unwrap() / reps as f64;
            }
        }
        for (i, &x) in xs.iter().enumerate() {
            let want = evaluate_coeffs(&sys, &expected, x).unwrap();
            // crude per-point MC band: var of s_hat(x) ~ s(x) sum phi^2 / T
            let var = 2.0 * 4.0 / (n as f64 * delta) / reps as f64;
            let tol = 4.0 * var.sqrt();
            assert!(
                (mean[i] - want).abs() < tol.max(0.02),
                "x={x}: mean {} vs {want}",
                mean[i]
            );
        }
    }

    #[test]
    fn unbiasedness_at_coefficient_level() {
        // mean of beta_hat over 500 replications = (1/Delta) E phi_r(X_Delta)
        let model = LevyModel::GammaProcess { shape_rate: 1.0, exp_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let sys = BasisSystem::new(BasisFamily::Haar, w, 2).unwrap();
        let delta = 0.01;
        let n = 2_000;
        let reps = 500usize;
        let target = expected_estimate(&model, &sys, delta).unwrap();
        let d = sys.dim();
        let mut sums = vec![0.0; d];
        let mut sq = vec![0.0; d];
        for r in 0..reps {
            let sample = model.sample_increments(n, delta, 77_000 + r as u64).unwrap();
            let beta = estimate_coefficients(&sample, &sys).unwrap();
            for i in 0..d {
                sums[i] += beta[i];
                sq[i] += beta[i] * beta[i];
            }
        }
        for i in 0..d {
            let mean = sums[i] / reps as f64;
            let var = (sq[i] / reps as f64 - mean * mean).max(0.0) / reps as f64;
            let se = var.sqrt();
            assert!(
                (mean - target[i]).abs() <= 4.0 * se + 1e-12,
                "coeff {i}: mean {mean} vs {} (se {se})",
                target[i]
            );
        }
    }

    #[test]
    fn deviation_stat_basics() {
        let sys = BasisSystem::new(BasisFamily::Haar, w01(), 2).unwrap();
        // est == reference -> 0
        let est = ProjectionEstimate {
            system: sys.clone(),
            coeffs: vec![1.0, 0.0, 1.0, 0.0],
            n: 10,
            delta: 0.1,
        };
        let self_rep = deviation_stat(
            &est,
            &|x| est.evaluate(x).unwrap(),
            &|_| 1.0,
            64,
            DeviationMode::AgainstTruth,
        )
        .unwrap();
        assert_eq!(self_rep.statistic, 0.0);
        // constant offset c with weight 1: statistic |c|
        let shifted = deviation_stat(
            &est,
            &|x| est.evaluate(x).unwrap() + 0.25,
            &|_| 1.0,
            64,
            DeviationMode::AgainstTruth,
        )
        .unwrap();
        assert!((shifted.statistic - 0.25).abs() < 1e-12);
    }

    #[test]
    fn deviation_stat_hand_example() {
        // Haar m=2 on [0,1]: s_hat piecewise (2,0,1,1), ref = 1, s = 4
        // sup |diff|/2 = 0.5
        let sys = BasisSystem::new(BasisFamily::Haar, w01(), 2).unwrap();
        let sqrt2 = 2.0_f64.sqrt(); // 1/sqrt(delta) with delta = 1/2
        // cell 1 halves (2,0): c0*sqrt2 - c1*sqrt2 = 2, c0*sqrt2 + c1*sqrt2 = 0
        // cell 2 halves (1,1): constant 1
        let coeffs = vec![
            2.0 / (2.0 * sqrt2) + 0.0 / (2.0 * sqrt2),
            0.0 / (2.0 * sqrt2) - 2.0 / (2.0 * sqrt2),
            1.0 / sqrt2,
            0.0,
        ];
        let est = ProjectionEstimate { system: sys, coeffs, n: 10, delta: 0.1 };
        assert!((est.evaluate(0.1).unwrap() - 2.0).abs() < 1e-9);
        assert!(est.evaluate(0.4).unwrap().abs() < 1e-9);
        assert!((est.evaluate(0.8).unwrap() - 1.0).abs() < 1e-9);
        let rep = deviation_stat(&est, &|_| 1.0, &|_| 4.0, 64, DeviationMode::AgainstTruth)
            .unwrap();
        assert!((rep.statistic - 0.5).abs() < 1e-9);
        assert!(rep.argmax_x < 0.5);
    }

    #[test]
    fn deviation_stat_rejects_vanishing_weight() {
        let sys = BasisSystem::new(BasisFamily::Haar, w01(), 1).unwrap();
        let est = ProjectionEstimate { system: sys, coeffs: vec![1.0, 0.0], n: 1, delta: 1.0 };
        let r = deviation_stat(&est, &|_| 0.0, &|x| x - 0.5, 64, DeviationMode::AgainstTruth);
        assert!(r.is_err());
    }

    #[test]
    fn deviation_stat_refinement_stable() {
        // smooth family: doubling the converged grid moves the statistic < 1e-6 rel
        let model = LevyModel::GammaProcess { shape_rate: 1.0, exp_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let sys = BasisSystem::new(BasisFamily::Trigonometric(2), w, 4).unwrap();
        let sample = model.sample_increments(50_000, 0.01, 5).unwrap();
        let est = fit(&sample, &sys).unwrap();
        let rep = deviation_stat(
            &est,
            &|x| model.levy_density(x).unwrap(),
            &|x| model.levy_density(x).unwrap(),
            256,
            DeviationMode::AgainstTruth,
        )
        .unwrap();
        let fine = deviation_stat(
            &est,
            &|x| model.levy_density(x).unwrap(),
            &|x| model.levy_density(x).unwrap(),
            rep.grid * 2,
            DeviationMode::AgainstTruth,
        )
        .unwrap();
        assert!(((rep.statistic - fine.statistic) / rep.statistic).abs() < 1e-5);
    }

    #[test]
    fn consistency_in_horizon() {
        // fixed m: the deviation statistic decreases stochastically as T grows
        let model = LevyModel::GammaProcess { shape_rate: 1.0, exp_rate: 1.0 };
        let w = Window::new(0.5, 1.5).unwrap();
        let sys = BasisSystem::new(BasisFamily::Haar, w, 4).unwrap();
        let kappa = 0.6;
        let mut medians = Vec::new();
        for (ti, t) in [10.0_f64, 100.0, 1000.0].iter().enumerate() {
            let n = t.powf(1.0 / kappa).round() as usize;
            let delta = t / n as f64;
            let mut stats: Vec<f64> = (0..50)
                .map(|r| {
                    let sample = model
                        .sample_increments(n, delta, 31_000 + (ti * 50 + r) as u64)
                        .unwrap();
                    let est = fit(&sample, &sys).unwrap();
                    deviation_stat(
                        &est,
                        &|x| model.levy_density(x).unwrap(),
                        &|x| model.levy_density(x).unwrap(),
                        128,
                        DeviationMode::AgainstTruth,
                    )
                    .unwrap()
                    .statistic
                })
                .collect();
            stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
            medians.push(stats[25]);
        }
        assert!(
            medians[0] > medians[1] && medians[1] > medians[2],
            "medians {medians:?}"
        );
    }
}
