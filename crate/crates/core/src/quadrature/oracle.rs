//! Brute-force midpoint-rule oracle for `F(t) = ∫ w(m) e^{-imt} dm`.
//!
//! Deliberately independent of the adaptive engine: no phase extraction, no
//! contour rotation, a fixed uniform grid on a finite window, one step of
//! Richardson extrapolation between `n` and `2n` nodes.
//!
//! The window is widened until the neglected tails are certified below
//! `tail_tol`. A tail contributes at most its probability mass, and for
//! `t ≠ 0` at most `2 w(U) / |t|` (one integration by parts on a
//! monotone tail), whichever is smaller.

use num_complex::Complex64;

use super::{Method, OscillatoryResult};
use crate::error::{invalid, Result};
use crate::masspec::MassDistribution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub tail_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { tail_tol: 1e-12 }
    }
}

/// Integration window in `m` and the certified bound on what it leaves out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleWindow {
    pub lo: f64,
    pub hi: f64,
    pub tail_bound: f64,
}

impl OracleWindow {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Node count above which the midpoint grid resolves `e^{-imt}`.
    pub fn resolution_threshold(&self, t: f64) -> usize {
        (t.abs() * self.width() / std::f64::consts::PI).ceil() as usize
    }
}

fn tail_bound(w: &MassDistribution, u: f64, t: f64, upper: bool) -> f64 {
    let mass = if upper {
        w.upper_tail_mass(u)
    } else {
        w.lower_tail_mass(u)
    };
    if t == 0.0 {
        mass
    } else {
        mass.min(2.0 * w.envelope(u) / t.abs())
    }
}

fn half_width(w: &MassDistribution, t: f64, tol: f64, upper: bool) -> f64 {
    let mut u = w.width;
    while tail_bound(w, u, t, upper) > tol {
        u *= 2.0;
        if !u.is_finite() {
            break;
        }
    }
    // shrink back towards the smallest admissible width
    let (mut good, mut bad) = (u, u / 2.0);
    for _ in 0..40 {
        let mid = 0.5 * (good + bad);
        if tail_bound(w, mid, t, upper) > tol {
            bad = mid;
        } else {
            good = mid;
        }
    }
    good
}

pub fn oracle_window(w: &MassDistribution, t: f64, tail_tol: f64) -> OracleWindow {
    let hi_off = half_width(w, t, 0.5 * tail_tol, true);
    let hi = w.mass + hi_off;
    let support_lo = w.lower_bound();
    let (lo, lower_tail) = if support_lo.is_finite() && support_lo >= w.mass - hi_off {
        (support_lo, 0.0)
    } else {
        let lo_off = half_width(w, t, 0.5 * tail_tol, false);
        let lo = (w.mass - lo_off).max(support_lo);
        let tail = if lo == support_lo {
            0.0
        } else {
            tail_bound(w, lo_off, t, false)
        };
        (lo, tail)
    };
    OracleWindow {
        lo,
        hi,
        tail_bound: tail_bound(w, hi_off, t, true) + lower_tail,
    }
}

/// Certified bound on the tails outside `[lo, hi]` at time `t`.
pub(crate) fn outside_bound(w: &MassDistribution, lo: f64, hi: f64, t: f64) -> f64 {
    let upper = tail_bound(w, hi - w.mass, t, true);
    let lower = if lo <= w.lower_bound() {
        0.0
    } else {
        tail_bound(w, w.mass - lo, t, false)
    };
    upper + lower
}

/// Compensated midpoint sum of `w(m) e^{-imt}` with `n` nodes.
pub(crate) fn midpoint_sum(w: &MassDistribution, t: f64, lo: f64, hi: f64, n: usize) -> Complex64 {
    let h = (hi - lo) / n as f64;
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for i in 0..n {
        let m = lo + (i as f64 + 0.5) * h;
        let weight = w.pdf(m);
        let (s, c) = (m * t).sin_cos();
        re.add(weight * c);
        im.add(-weight * s);
    }
    Complex64::new(re.total(), im.total()) * h
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn riemann_oracle(w: &MassDistribution, t: f64, n: usize) -> Result<OscillatoryResult> {
    riemann_oracle_with(w, t, n, &OracleConfig::default())
}

/// Any real `t` is accepted, so conjugate symmetry can be checked directly.
pub fn riemann_oracle_with(
    w: &MassDistribution,
    t: f64,
    n: usize,
    cfg: &OracleConfig,
) -> Result<OscillatoryResult> {
    if n < 2 {
        return Err(invalid("n", format!("must be >= 2, got {n}")));
    }
    if !t.is_finite() {
        return Err(invalid("t", "must be finite"));
    }
    let win = oracle_window(w, t, cfg.tail_tol);
    let coarse = midpoint_sum(w, t, win.lo, win.hi, n);
    let fine = midpoint_sum(w, t, win.lo, win.hi, 2 * n);
    let value = (fine * 4.0 - coarse) / 3.0;
    Ok(OscillatoryResult {
        value,
        abs_error_estimate: (fine - coarse).norm() / 3.0 + win.tail_bound,
        evaluations: 3 * n,
        method: Method::RiemannOracle,
    })
}

/// Picks `n` at `oversample` times the resolution threshold (at least 4096).
pub fn riemann_oracle_auto(
    w: &MassDistribution,
    t: f64,
    cfg: &OracleConfig,
    oversample: usize,
) -> Result<OscillatoryResult> {
    let win = oracle_window(w, t, cfg.tail_tol);
    let scale_nodes = (win.width() / w.width * 16.0).ceil() as usize;
    let n = (win.resolution_threshold(t) * oversample)
        .max(scale_nodes)
        .max(4096);
    riemann_oracle_with(w, t, n, cfg)
}
