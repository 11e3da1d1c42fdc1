//! Spectrally positive Lévy models with closed-form jump densities,
//! exact increment simulation and transition laws.
//!
//! Both models have no drift and no Brownian component, so the increment law
//! of `X_Δ` is available in closed form: a compound Poisson sum of
//! exponentials (with an atom at 0) or a gamma distribution. That makes the
//! expected estimator computable by quadrature instead of nested Monte Carlo.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::basis::Window;
use crate::error::{Error, Result};
use crate::num::{expint, streams};

/// A simulatable Lévy process with known Lévy density `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevyModel {
    /// Jumps arrive at rate `intensity` and are `Exp(jump_rate)` distributed:
    /// `s(x) = intensity * jump_rate * e^{-jump_rate x}`.
    CompoundPoissonExp { intensity: f64, jump_rate: f64 },
    /// Gamma subordinator: `s(x) = shape_rate * e^{-exp_rate x} / x`,
    /// `X_Δ ~ Gamma(shape_rate * Δ, exp_rate)`.
    GammaProcess { shape_rate: f64, exp_rate: f64 },
}

/// Equidistant increments `X_{kΔ} - X_{(k-1)Δ}` with the seed that made them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncrementSample {
    pub delta: f64,
    pub seed: u64,
    pub values: Vec<f64>,
}

impl IncrementSample {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Observation horizon `T = n * Δ`.
    pub fn horizon(&self) -> f64 {
        self.values.len() as f64 * self.delta
    }
}

impl LevyModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            LevyModel::CompoundPoissonExp { intensity, jump_rate } => {
                intensity > 0.0 && jump_rate > 0.0
            }
            LevyModel::GammaProcess { shape_rate, exp_rate } => {
                shape_rate > 0.0 && exp_rate > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("model parameters must be strictly positive"))
        }
    }

    /// Lévy density `s(x)` for `x > 0`.
    pub fn levy_density(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Err(Error::domain(format!(
                "Lévy density of a spectrally positive model needs x > 0, got {x}"
            )));
        }
        Ok(match *self {
            LevyModel::CompoundPoissonExp { intensity, jump_rate } => {
                intensity * jump_rate * (-jump_rate * x).exp()
            }
            LevyModel::GammaProcess { shape_rate, exp_rate } => {
                shape_rate * (-exp_rate * x).exp() / x
            }
        })
    }

    /// Jump-measure tail `nu([x, ∞))` for `x > 0`.
    pub fn levy_tail(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Err(Error::domain(format!("Lévy tail needs x > 0, got {x}")));
        }
        Ok(match *self {
            LevyModel::CompoundPoissonExp { intensity, jump_rate } => {
                intensity * (-jump_rate * x).exp()
            }
            LevyModel::GammaProcess { shape_rate, exp_rate } => {
                shape_rate * expint::e1(exp_rate * x)
            }
        })
    }

    /// Draw `n` i.i.d. increments of `X_Δ`. Each increment has its own
    /// counter-based RNG substream, so the output is bit-identical for any
    /// worker partitioning.
    pub fn sample_increments(&self, n: usize, delta: f64, seed: u64) -> Result<IncrementSample> {
        self.validate()?;
        if n == 0 {
            return Err(Error::invalid("need n >= 1 increments"));
        }
        if !(delta > 0.0) {
            return Err(Error::invalid("sampling step delta must be positive"));
        }
        let model = *self;
        let batches = (n as u64).div_ceil(streams::BATCH);
        let mut values = vec![0.0; n];
        values
            .par_chunks_mut(streams::BATCH as usize)
            .enumerate()
            .for_each(|(bi, chunk)| {
                debug_assert!((bi as u64) < batches);
                let mut rng = streams::batch_stream(seed, bi as u64);
                for v in chunk.iter_mut() {
                    *v = model.draw_increment(delta, &mut rng);
                }
            });
        Ok(IncrementSample { delta, seed, values })
    }

    fn draw_increment<R: Rng>(&self, delta: f64, rng: &mut R) -> f64 {
        match *self {
            LevyModel::CompoundPoissonExp { intensity, jump_rate } => {
                let count = Poisson::new(intensity * delta).unwrap().sample(rng) as usize;
                let jump = Exp::new(jump_rate).unwrap();
                (0..count).map(|_| jump.sample(rng)).sum()
            }
            LevyModel::GammaProcess { shape_rate, exp_rate } => {
                Gamma::new(shape_rate * delta, 1.0 / exp_rate).unwrap().sample(rng)
            }
        }
    }

    /// Probability mass of `{X_Δ = 0}`; zero for the gamma process.
    pub fn transition_atom(&self, delta: f64) -> f64 {
        match *self {
            LevyModel::CompoundPoissonExp { intensity, .. } => (-intensity * delta).exp(),
            LevyModel::GammaProcess { .. } => 0.0,
        }
    }

    /// Density of the absolutely continuous part of `X_Δ` at `x`; 0 for
    /// `x <= 0`. The compound Poisson series is truncated once the Poisson
    /// tail falls below 1e-12.
    pub fn transition_density(&self, delta: f64, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            LevyModel::CompoundPoissonExp { intensity, jump_rate } => {
                let lam = intensity * delta;
                let mut pois = (-lam).exp(); // P{N=0}
                let mut cum = pois;
                let mut density = 0.0;
                for k in 1..=poisson_cutoff(lam) {
                    pois *= lam / k as f64;
                    cum += pois;
                    // Gamma(k, jump_rate) density at x
                    let lg = (k as f64) * jump_rate.ln() + (k as f64 - 1.0) * x.ln()
                        - jump_rate * x
                        - ln_gamma(k as f64);
                    density += pois * lg.exp();
                    if 1.0 - cum < 1e-12 {
                        break;
                    }
                }
                density
            }
            LevyModel::GammaProcess { shape_rate, exp_rate } => {
                let shape = shape_rate * delta;
                let lg = shape * exp_rate.ln() + (shape - 1.0) * x.ln()
                    - exp_rate * x
                    - ln_gamma(shape);
                lg.exp()
            }
        }
    }

    /// `P{X_Δ >= x}` for `x > 0` (the atom at 0 never enters).
    pub fn transition_tail(&self, delta: f64, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("transition tail needs x > 0".to_string()));
        }
        Ok(match *self {
            LevyModel::CompoundPoissonExp { intensity, jump_rate } => {
                let lam = intensity * delta;
                let mut pois = (-lam).exp();
                let mut cum = pois;
                let mut tail = 0.0;
                for k in 1..=poisson_cutoff(lam) {
                    pois *= lam / k as f64;
                    cum += pois;
                    // Erlang(k, jump_rate) survival = upper regularized gamma
                    tail += pois * gamma_ur(k as f64, jump_rate * x);
                    if 1.0 - cum < 1e-14 {
                        break;
                    }
                }
                tail + (1.0 - cum) // remaining Poisson mass sits at large sums
            }
            LevyModel::GammaProcess { shape_rate, exp_rate } => {
                gamma_ur(shape_rate * delta, exp_rate * x)
            }
        })
    }

    /// `P{X_Δ <= x}` for `x >= 0`, including the atom.
    pub fn transition_cdf(&self, delta: f64, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            LevyModel::CompoundPoissonExp { .. } => {
                if x == 0.0 {
                    self.transition_atom(delta)
                } else {
                    1.0 - self.transition_tail(delta, x).unwrap()
                }
            }
            LevyModel::GammaProcess { shape_rate, exp_rate } => {
                if x == 0.0 {
                    0.0
                } else {
                    gamma_lr(shape_rate * delta, exp_rate * x)
                }
            }
        }
    }

    /// Small-time diagnostic: `sup_x |Δ^{-1} P{X_Δ >= x} - nu([x,∞))|` over a
    /// grid of the window. The ratio `value / Δ` estimates the constant of
    /// the small-time property and stabilizes as `Δ -> 0`.
    pub fn small_time_check(&self, window: &Window, delta: f64, grid: usize) -> Result<f64> {
        self.validate()?;
        if grid < 2 {
            return Err(Error::invalid("small_time_check needs grid >= 2"));
        }
        let mut worst: f64 = 0.0;
        for i in 0..grid {
            let x = window.a() + window.width() * i as f64 / (grid - 1) as f64;
            let p = self.transition_tail(delta, x)?;
            let diff = (p / delta - self.levy_tail(x)?).abs();
            worst = worst.max(diff);
        }
        Ok(worst)
    }

    /// Fitted small-time constant: `max over deltas of small_time_check/Δ`.
    pub fn fit_small_time_q(&self, window: &Window, deltas: &[f64], grid: usize) -> Result<f64> {
        let mut q: f64 = 0.0;
        for &d in deltas {
            q = q.max(self.small_time_check(window, d, grid)? / d);
        }
        Ok(q)
    }
}

fn poisson_cutoff(lam: f64) -> usize {
    (lam + 12.0 * lam.sqrt() + 40.0).ceil() as usize
}
