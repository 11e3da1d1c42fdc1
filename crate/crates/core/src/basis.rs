//! Piecewise orthonormal basis systems on a window `[a, b]`.
//!
//! A system splits the window into `m` cells of width `delta = (b-a)/m` and
//! places `J+1` rescaled copies of a standard basis on each cell:
//!
//! `psi_j(x) = sqrt((bt-at)/delta) * psi~_j((bt-at)(x-a)/delta + at)`
//!
//! where `[at, bt]` is the family's standard interval. The global functions
//! `phi_r` are the cell translates `psi_j(x - delta(p-1)) 1{x in I_p}` with
//! half-open cells `I_p = [a+delta(p-1), a+delta p)` and the last cell closed
//! at `b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::gauss;

/// Estimation window `[a, b]` with `0` outside it (the deviation statistic
/// divides by `sqrt(s)`, which requires a window bounded away from `0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    a: f64,
    b: f64,
}

impl Window {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!("window requires a < b, got [{a}, {b}]")));
        }
        if a <= 0.0 && b >= 0.0 {
            return Err(Error::invalid(format!("window [{a}, {b}] must exclude 0")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }
}

/// Basis family with polynomial/harmonic order `J`.
///
/// Each family spans `J+1` functions per cell; trigonometric systems need an
/// even `J >= 2` (one constant plus `J/2` cos/sin pairs), Haar fixes `J = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", content = "J")]
pub enum BasisFamily {
    Trigonometric(u32),
    Legendre(u32),
    Haar,
}

impl BasisFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BasisFamily::Trigonometric(j) if j < 2 || j % 2 != 0 => Err(Error::invalid(
                format!("trigonometric basis requires even J >= 2, got {j}"),
            )),
            _ => Ok(()),
        }
    }

    /// The order `J`; the cell dimension is `J + 1`.
    pub fn order(&self) -> u32 {
        match *self {
            BasisFamily::Trigonometric(j) | BasisFamily::Legendre(j) => j,
            BasisFamily::Haar => 1,
        }
    }

    pub fn funcs_per_cell(&self) -> usize {
        self.order() as usize + 1
    }

    /// Standard interval `[at, bt]` the local basis is rescaled from.
    pub fn standard_interval(&self) -> (f64, f64) {
        match self {
            BasisFamily::Trigonometric(_) => (0.0, 2.0 * std::f64::consts::PI),
            BasisFamily::Legendre(_) => (-1.0, 1.0),
            BasisFamily::Haar => (0.0, 1.0),
        }
    }

    /// Evaluate the `j`-th standard basis function at `x` in the standard
    /// interval. The family is orthonormal there with Lebesgue measure.
    ///
    /// Trigonometric ordering: `j=0` constant, then `cos(kx), sin(kx)` pairs
    /// for `k = 1..J/2`.
    pub fn standard_eval(&self, j: usize, x: f64) -> Result<f64> {
        self.validate()?;
        if j > self.order() as usize {
            return Err(Error::domain(format!("basis index {j} exceeds order {}", self.order())));
        }
        let (at, bt) = self.standard_interval();
        if x < at || x > bt {
            return Err(Error::domain(format!("x = {x} outside standard interval [{at}, {bt}]")));
        }
        Ok(match self {
            BasisFamily::Trigonometric(_) => {
                if j == 0 {
                    1.0 / (2.0 * std::f64::consts::PI).sqrt()
                } else {
                    let k = j.div_ceil(2) as f64;
                    let scale = 1.0 / std::f64::consts::PI.sqrt();
                    if j % 2 == 1 {
                        scale * (k * x).cos()
                    } else {
                        scale * (k * x).sin()
                    }
                }
            }
            BasisFamily::Legendre(_) => {
                ((2.0 * j as f64 + 1.0) / 2.0).sqrt() * gauss::legendre(j, x)
            }
            BasisFamily::Haar => {
                if j == 0 {
                    1.0
                } else if x >= 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
        })
    }
}

/// A complete basis system: family, window and cell count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSystem {
    family: BasisFamily,
    window: Window,
    m: usize,
    delta: f64,
}

impl BasisSystem {
    pub fn new(family: BasisFamily, window: Window, m: usize) -> Result<Self> {
        family.validate()?;
        if m == 0 {
            return Err(Error::invalid("cell count m must be >= 1"));
        }
        let delta = window.width() / m as f64;
        Ok(Self { family, window, m, delta })
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn order(&self) -> u32 {
        self.family.order()
    }

    /// Total dimension `d = (J+1) * m`.
    pub fn dim(&self) -> usize {
        self.family.funcs_per_cell() * self.m
    }

    /// Cell index (0-based) containing `x`; cells are half-open with the last
    /// cell closed at `b`.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        if !self.window.contains(x) {
            return None;
        }
        let p = ((x - self.window.a) / self.delta) as usize;
        Some(p.min(self.m - 1))
    }

    /// Flattened coefficient index for cell `p` (0-based) and local index `j`.
    ///
    /// Layout is cell-major with the local ordering of
    /// [`BasisFamily::standard_eval`]; this fixes the serialization order of
    /// coefficient vectors.
    pub fn flat_index(&self, p: usize, j: usize) -> usize {
        p * self.family.funcs_per_cell() + j
    }

    /// Local basis function `psi_j` on the first cell `[a, a+delta)`.
    /// The right edge is accepted and evaluated as the limit from inside.
    pub fn local_eval(&self, j: usize, x: f64) -> Result<f64> {
        let a = self.window.a;
        if !(x >= a && x <= a + self.delta) {
            return Err(Error::domain(format!(
                "x = {x} outside first cell [{a}, {})",
                a + self.delta
            )));
        }
        let (at, bt) = self.family.standard_interval();
        let t = (bt - at) * (x - a) / self.delta + at;
        let t = t.clamp(at, bt);
        Ok(((bt - at) / self.delta).sqrt() * self.family.standard_eval(j, t)?)
    }

    /// Global basis function `phi_r` with `r = (j, p)`, `p` 1-based as in the
    /// cell enumeration; returns 0 outside `I_p`.
    pub fn global_eval(&self, j: usize, p: usize, x: f64) -> Result<f64> {
        if p == 0 || p > self.m {
            return Err(Error::domain(format!("cell index {p} outside 1..={}", self.m)));
        }
        match self.cell_of(x) {
            Some(cell) if cell == p - 1 => {
                self.local_eval(j, x - self.delta * (p - 1) as f64)
            }
            _ => Ok(0.0),
        }
    }

    /// Evaluate all `J+1` local functions of the cell containing `x` into
    /// `out`; returns the cell index. Hot path for estimation and evaluation.
    pub fn cell_eval(&self, x: f64, out: &mut [f64]) -> Option<usize> {
        let p = self.cell_of(x)?;
        let local_x = x - self.window.a - self.delta * p as f64;
        let (at, bt) = self.family.standard_interval();
        let t = ((bt - at) * local_x / self.delta + at).clamp(at, bt);
        let scale = ((bt - at) / self.delta).sqrt();
        match self.family {
            BasisFamily::Trigonometric(j_max) => {
                out[0] = scale / (2.0 * std::f64::consts::PI).sqrt();
                let pi_scale = scale / std::f64::consts::PI.sqrt();
                for k in 1..=(j_max as usize / 2) {
                    let (s, c) = (k as f64 * t).sin_cos();
                    out[2 * k - 1] = pi_scale * c;
                    out[2 * k] = pi_scale * s;
                }
            }
            BasisFamily::Legendre(j_max) => {
                let mut p0 = 1.0;
                let mut p1 = t;
                out[0] = scale * (0.5_f64).sqrt();
                if j_max >= 1 {
                    out[1] = scale * (1.5_f64).sqrt() * t;
                }
                for j in 2..=(j_max as usize) {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * t * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                    out[j] = scale * ((2.0 * jf + 1.0) / 2.0).sqrt() * p2;
                }
            }
            BasisFamily::Haar => {
                out[0] = scale;
                out[1] = if t >= 0.5 { scale } else { -scale };
            }
        }
        Some(p)
    }

    /// Max Gram deviation `max_{r,r'} |∫ phi_r phi_r' - 1{r=r'}|`.
    ///
    /// Cross-cell products vanish by disjoint support; within a cell the Gram
    /// matrix is integrated exactly (Haar), by Gauss–Legendre (Legendre) or
    /// by a composite Simpson rule with `quad_order` points (trigonometric).
    pub fn verify_orthonormality(&self, quad_order: usize) -> Result<f64> {
        let nf = self.family.funcs_per_cell();
        let mut worst: f64 = 0.0;
        for p in 1..=self.m {
            let lo = self.window.a + self.delta * (p - 1) as f64;
            let gram = self.cell_gram(lo, quad_order)?;
            for i in 0..nf {
                for j in 0..nf {
                    let want = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((gram[i * nf + j] - want).abs());
                }
            }
        }
        Ok(worst)
    }

    fn cell_gram(&self, lo: f64, quad_order: usize) -> Result<Vec<f64>> {
        let nf = self.family.funcs_per_cell();
        let mut gram = vec![0.0; nf * nf];
        match self.family {
            BasisFamily::Haar => {
                // products of piecewise constants: integrate half-cells exactly
                let half = 0.5 * self.delta;
                for (i, gi) in [(0usize, [1.0, 1.0]), (1usize, [-1.0, 1.0])] {
                    for (j, gj) in [(0usize, [1.0, 1.0]), (1usize, [-1.0, 1.0])] {
                        let v = (gi[0] * gj[0] + gi[1] * gj[1]) * half / self.delta;
                        gram[i * nf + j] = v;
                    }
                }
            }
            BasisFamily::Legendre(jm) => {
                let order = quad_order.max(jm as usize + 1);
                let (xs, ws) = gauss::gauss_legendre(order);
                // map [-1,1] -> [lo, lo+delta]
                for (t, w) in xs.iter().zip(&ws) {
                    let x = lo + 0.5 * self.delta * (t + 1.0);
                    let mut vals = vec![0.0; nf];
                    self.eval_local_at(x - lo, &mut vals)?;
                    let w_phys = w * 0.5 * self.delta;
                    accumulate_outer(&mut gram, &vals, w_phys);
                }
            }
            BasisFamily::Trigonometric(_) => {
                let n = quad_order.max(64) | 1; // odd point count for Simpson
                let h = self.delta / (n - 1) as f64;
                for i in 0..n {
                    let x = (i as f64) * h;
                    let mut vals = vec![0.0; nf];
                    self.eval_local_at(x.min(self.delta), &mut vals)?;
                    let w = simpson_weight(i, n) * h;
                    accumulate_outer(&mut gram, &vals, w);
                }
            }
        }
        Ok(gram)
    }

    fn eval_local_at(&self, local_x: f64, out: &mut [f64]) -> Result<()> {
        let (at, bt) = self.family.standard_interval();
        let t = ((bt - at) * local_x / self.delta + at).clamp(at, bt);
        let scale = ((bt - at) / self.delta).sqrt();
        for (j, o) in out.iter_mut().enumerate() {
            *o = scale * self.family.standard_eval(j, t)?;
        }
        Ok(())
    }

    /// Boundedness/variation constants of Eq-level condition on the rescaled
    /// functions: `C1 = max_j sqrt(delta) sup |psi_j|`,
    /// `C2 = max_j sqrt(delta) V(psi_j)`. Both are independent of `m`.
    ///
    /// Haar and trigonometric values are closed-form; Legendre uses a dense
    /// grid (2^14) with monotone-segment summation for the total variation.
    pub fn boundedness_constants(&self) -> (f64, f64) {
        match self.family {
            BasisFamily::Haar => (1.0, 2.0),
            BasisFamily::Trigonometric(j) => {
                // sup of sqrt(2/delta) cos = sqrt(2); TV of cos over k periods
                // is 4k, largest at k = J/2
                (2.0_f64.sqrt(), 2.0 * 2.0_f64.sqrt() * (j as f64))
            }
            BasisFamily::Legendre(jm) => {
                // sqrt(delta) psi_j maps to sqrt(2j+1) P_j(t) on [-1, 1]
                let grid: usize = 1 << 14;
                let mut c1: f64 = 0.0;
                let mut c2: f64 = 0.0;
                for j in 0..=(jm as usize) {
                    let norm = (2.0 * j as f64 + 1.0).sqrt();
                    let mut sup: f64 = 0.0;
                    let mut tv = 0.0;
                    let mut prev = norm * gauss::legendre(j, -1.0);
                    sup = sup.max(prev.abs());
                    for i in 1..=grid {
                        let t = -1.0 + 2.0 * i as f64 / grid as f64;
                        let v = norm * gauss::legendre(j, t);
                        sup = sup.max(v.abs());
                        tv += (v - prev).abs();
                        prev = v;
                    }
                    c1 = c1.max(sup);
                    c2 = c2.max(tv);
                }
                (c1, c2)
            }
        }
    }
}

fn accumulate_outer(gram: &mut [f64], vals: &[f64], w: f64) {
    let nf = vals.len();
    for i in 0..nf {
        for j in 0..nf {
            gram[i * nf + j] += w * vals[i] * vals[j];
        }
    }
}

fn simpson_weight(i: usize, n: usize) -> f64 {
    // composite Simpson over n (odd) points
    if i == 0 || i == n - 1 {
        1.0 / 3.0
    } else if i % 2 == 1 {
        4.0 / 3.0
    } else {
        2.0 / 3.0
    }
}
