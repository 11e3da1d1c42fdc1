//! Standard normal density, CDF and survival function.
//!
//! The survival function goes through `erfc` so that `1 - Phi(u)` keeps full
//! relative precision deep in the tail. `2 m (1 - Phi(u_m))` terms multiply a
//! huge and a tiny factor; a naive `1.0 - cdf` would cancel to zero.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal density `phi(x)`.
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function `Phi(x)`.
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Survival function `1 - Phi(x)`, accurate to ~1e-13 relative for x <= 37.
pub fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Inverse of the standard normal CDF (bisection on [`cdf`], 1e-13 absolute).
pub fn quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1)");
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}
