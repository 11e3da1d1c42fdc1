//! Adaptive Simpson quadrature with an absolute-error budget.

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Classic recursive Simpson with Richardson correction; `max_depth` caps the
/// bisection depth (interval width `(b-a)/2^depth`).
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    if a == b {
        return 0.0;
    }
    let c = 0.5 * (a + b);
    let (fa, fb, fc) = (f(a), f(b), f(c));
    let whole = simpson(a, b, fa, fc, fb);
    step(f, a, b, fa, fb, fc, whole, tol, max_depth)
}

fn simpson(a: f64, b: f64, fa: f64, fc: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fc + fb)
}

#[allow(clippy::too_many_arguments)]
fn step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let (fd, fe) = (f(d), f(e));
    let left = simpson(a, c, fa, fd, fc);
    let right = simpson(c, b, fc, fe, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        step(f, a, c, fa, fc, fd, left, 0.5 * tol, depth - 1)
            + step(f, c, b, fc, fb, fe, right, 0.5 * tol, depth - 1)
    }
}

/// Integrate a rapidly decaying integrand over `[a, ∞)`.
///
/// Truncates at `a + span` and integrates adaptively; callers pick `span`
/// so that the remainder is below their tolerance (all tails here decay at
/// least like `e^{-x}`).
pub fn adaptive_to_inf(f: &dyn Fn(f64) -> f64, a: f64, span: f64, tol: f64) -> f64 {
    adaptive(f, a, a + span, tol, 60)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let got = adaptive(&|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 40);
        assert!((got - 8.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand() {
        let got = adaptive(&|x: f64| (10.0 * x).cos(), 0.0, 1.0, 1e-12, 50);
        assert!((got - 10.0_f64.sin() / 10.0).abs() < 1e-11);
    }

    #[test]
    fn gaussian_tail() {
        let got = adaptive_to_inf(
            &|x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            2.0,
            40.0,
            1e-13,
        );
        assert!((got - crate::num::normal::sf(2.0)).abs() < 1e-12);
    }
}
