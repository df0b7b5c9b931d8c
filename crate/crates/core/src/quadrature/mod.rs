//! Fourier-type integrals `F(t) = ∫ w(m) e^{-imt} dm` of a mass distribution.
//!
//! Every numeric path factors out the carrier `e^{-iMt}` and integrates the
//! envelope `w(M + u) e^{-iut}` over the offset `u`, so only oscillations on
//! the width scale remain.
//!
//! * [`Method::ClosedForm`]: full-line Breit-Wigner and Gaussian.
//! * [`Method::PhaseExtractedAdaptive`]: adaptive Gauss-Kronrod on a finite
//!   window of the real axis. Breit-Wigner tails beyond the window are
//!   rotated onto downward rays `u = U − is`, where they become smooth
//!   Laplace integrals; Gaussian tails are clipped and their mass is added
//!   to the error estimate.
//! * [`Method::SteepestDescent`]: the truncated Breit-Wigner integral is
//!   the pole residue `N e^{-Γt/2}` plus a single Laplace integral along
//!   the ray through the threshold. This stays accurate deep in the
//!   power-law tail where the real-axis integral cancels to many digits.
//! * [`Method::RiemannOracle`]: see [`oracle`].

pub(crate) mod gk;
pub mod oracle;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::masspec::{Family, MassDistribution};
use gk::{integrate, uniform_breaks, Estimate, Tolerance};

pub use oracle::{riemann_oracle, riemann_oracle_with, OracleConfig};

/// Environment variable overriding the default absolute tolerance.
pub const TOLERANCE_ENV: &str = "DECAY_QUAD_TOL";

pub const DEFAULT_ABS_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_EVALUATIONS: usize = 1_000_000;

// Gaussian window half-width in standard deviations; the clipped mass is
// ≈ 2e-17 and is added to the error estimate anyway.
const GAUSSIAN_WINDOW_SIGMAS: f64 = 8.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    PhaseExtractedAdaptive,
    SteepestDescent,
    RiemannOracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub method: Method,
}

impl OscillatoryResult {
    pub(crate) fn exact(value: Complex64) -> Self {
        Self {
            value,
            abs_error_estimate: 0.0,
            evaluations: 0,
            method: Method::ClosedForm,
        }
    }

    pub fn conj(self) -> Self {
        Self {
            value: self.value.conj(),
            ..self
        }
    }

    /// `|F|²` with a first-order propagated error bound.
    pub fn probability(&self) -> (f64, f64) {
        let modulus = self.value.norm();
        let err = self.abs_error_estimate;
        (self.value.norm_sqr(), 2.0 * modulus * err + err * err)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: usize,
    /// Skip closed forms and the steepest-descent shortcut.
    pub force_numeric: bool,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: DEFAULT_ABS_TOL,
            rel_tol: 0.0,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
            force_numeric: false,
        }
    }
}

impl QuadOptions {
    /// Defaults, with `abs_tol` taken from [`TOLERANCE_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        let mut opts = Self::default();
        if let Ok(raw) = std::env::var(TOLERANCE_ENV) {
            let tol: f64 = raw
                .trim()
                .parse()
                .map_err(|_| invalid("DECAY_QUAD_TOL", format!("not a number: {raw:?}")))?;
            if !(tol.is_finite() && tol > 0.0) {
                return Err(invalid("DECAY_QUAD_TOL", format!("must be > 0, got {tol}")));
            }
            opts.abs_tol = tol;
        }
        Ok(opts)
    }

    pub fn numeric(self) -> Self {
        Self {
            force_numeric: true,
            ..self
        }
    }

    fn tolerance(&self, pieces: usize) -> Tolerance {
        Tolerance {
            abs: self.abs_tol / pieces as f64,
            rel: self.rel_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_stop: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_stop: f64, n_points: usize, spacing: Spacing) -> Result<Self> {
        let grid = Self {
            t_start,
            t_stop,
            n_points,
            spacing,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn uniform(t_start: f64, t_stop: f64, n_points: usize) -> Result<Self> {
        Self::new(t_start, t_stop, n_points, Spacing::Uniform)
    }

    pub fn log(t_start: f64, t_stop: f64, n_points: usize) -> Result<Self> {
        Self::new(t_start, t_stop, n_points, Spacing::Log)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_start >= 0.0) {
            return Err(invalid(
                "t_start",
                format!("must be finite and >= 0, got {}", self.t_start),
            ));
        }
        if !(self.t_stop.is_finite() && self.t_stop > self.t_start) {
            return Err(invalid(
                "t_stop",
                format!("must be finite and > t_start, got {}", self.t_stop),
            ));
        }
        if self.n_points < 2 {
            return Err(invalid(
                "n_points",
                format!("must be >= 2, got {}", self.n_points),
            ));
        }
        if self.spacing == Spacing::Log && self.t_start <= 0.0 {
            return Err(invalid("t_start", "log spacing needs t_start > 0"));
        }
        Ok(())
    }

    /// Grid times; both endpoints are reproduced exactly.
    pub fn points(&self) -> Vec<f64> {
        let last = self.n_points - 1;
        let mut pts: Vec<f64> = (0..self.n_points)
            .map(|i| {
                let frac = i as f64 / last as f64;
                match self.spacing {
                    Spacing::Uniform => self.t_start + (self.t_stop - self.t_start) * frac,
                    Spacing::Log => self.t_start * (self.t_stop / self.t_start).powf(frac),
                }
            })
            .collect();
        pts[0] = self.t_start;
        pts[last] = self.t_stop;
        pts
    }
}

/// `F(t)` for `t ≥ 0` with the default options.
pub fn fourier_point(w: &MassDistribution, t: f64) -> Result<OscillatoryResult> {
    fourier_point_with(w, t, &QuadOptions::default())
}

pub fn fourier_point_with(
    w: &MassDistribution,
    t: f64,
    opts: &QuadOptions,
) -> Result<OscillatoryResult> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    fourier_signed(w, t, opts)
}

/// `F(t)` for any real `t`, using `F(−t) = conj F(t)`.
pub(crate) fn fourier_signed(
    w: &MassDistribution,
    t: f64,
    opts: &QuadOptions,
) -> Result<OscillatoryResult> {
    if t < 0.0 {
        return fourier_signed(w, -t, opts).map(OscillatoryResult::conj);
    }
    if t == 0.0 {
        return Ok(OscillatoryResult::exact(Complex64::new(1.0, 0.0)));
    }
    if !opts.force_numeric {
        if let Some(value) = closed_form(w, t) {
            return Ok(OscillatoryResult::exact(value));
        }
        if w.is_bounded_below() {
            return steepest_descent(w, t, opts);
        }
    }
    phase_extracted(w, t, opts)
}

/// One result per grid point, evaluated independently (in parallel when the
/// `parallel` feature is on).
pub fn fourier_grid(w: &MassDistribution, grid: &TimeGrid) -> Result<Vec<OscillatoryResult>> {
    fourier_grid_with(w, grid, &QuadOptions::default())
}

pub fn fourier_grid_with(
    w: &MassDistribution,
    grid: &TimeGrid,
    opts: &QuadOptions,
) -> Result<Vec<OscillatoryResult>> {
    grid.validate()?;
    crate::map_points(&grid.points(), |&t| fourier_point_with(w, t, opts))
        .into_iter()
        .collect()
}

pub fn closed_form(w: &MassDistribution, t: f64) -> Option<Complex64> {
    let carrier = Complex64::new(0.0, -w.mass * t).exp();
    match w.family {
        Family::BreitWignerFullLine => Some(carrier * (-0.5 * w.width * t.abs()).exp()),
        Family::Gaussian { sigma } => Some(carrier * (-0.5 * sigma * sigma * t * t).exp()),
        Family::BreitWignerTruncated { .. } => None,
    }
}

fn carrier(w: &MassDistribution, t: f64) -> Complex64 {
    Complex64::new(0.0, -w.mass * t).exp()
}

fn non_convergence(t: f64, est: Estimate, target: f64) -> Error {
    Error::QuadratureNonConvergence {
        t,
        achieved: est.error,
        target,
        evaluations: est.evaluations,
    }
}

/// `∫₀^∞ h(s) e^{-st} ds` for `t > 0`, with `s = c y / (1 − y)`.
fn laplace<H>(
    h: H,
    t: f64,
    scale: f64,
    tol: Tolerance,
    budget: usize,
) -> std::result::Result<Estimate, Estimate>
where
    H: Fn(f64) -> Complex64,
{
    let c = 1.0 / (t + 1.0 / scale);
    let integrand = |y: f64| {
        let one_minus = 1.0 - y;
        let s = c * y / one_minus;
        let jac = c / (one_minus * one_minus);
        let decay = (-s * t).exp();
        if decay == 0.0 || !jac.is_finite() {
            Complex64::default()
        } else {
            h(s) * (decay * jac)
        }
    };
    integrate(integrand, &uniform_breaks(0.0, 1.0, 8), tol, budget)
}

/// Truncated Breit-Wigner via contour deformation into the lower half plane.
fn steepest_descent(w: &MassDistribution, t: f64, opts: &QuadOptions) -> Result<OscillatoryResult> {
    let a = w.lower_bound() - w.mass;
    let tol = opts.tolerance(1);
    let ray = |s: f64| {
        w.envelope_complex(Complex64::new(a, -s))
            .expect("truncated Breit-Wigner continues analytically")
    };
    let scale = a.abs() + w.width;
    let est = laplace(ray, t, scale, tol, opts.max_evaluations)
        .map_err(|e| non_convergence(t, e, tol.target(e.value)))?;
    let pole = Complex64::new(w.norm_const * (-0.5 * w.width * t).exp(), 0.0);
    let edge = Complex64::new(0.0, -1.0) * Complex64::new(0.0, -a * t).exp() * est.value;
    Ok(OscillatoryResult {
        value: carrier(w, t) * (pole + edge),
        abs_error_estimate: est.error,
        evaluations: est.evaluations,
        method: Method::SteepestDescent,
    })
}

/// Real-axis window `[lo, hi]` in the offset variable; tails outside are
/// handled per family.
fn phase_extracted(w: &MassDistribution, t: f64, opts: &QuadOptions) -> Result<OscillatoryResult> {
    let kernel = |u: f64| Complex64::new(0.0, -u * t).exp() * w.envelope(u);
    let support_lo = w.lower_bound() - w.mass;

    let (lo, hi, clipped_mass, rays) = match w.family {
        Family::Gaussian { sigma } => {
            let half = GAUSSIAN_WINDOW_SIGMAS * sigma;
            let clipped = w.upper_tail_mass(half) + w.lower_tail_mass(half);
            (-half, half, clipped, (false, false))
        }
        Family::BreitWignerFullLine | Family::BreitWignerTruncated { .. } => {
            // any U > 0 is exact; shrink the window at large t to limit the
            // number of oscillations it holds
            let half = w.width * (20.0 / (w.width * t)).clamp(0.5, 8.0);
            if support_lo > -half {
                (
                    support_lo,
                    half.max(support_lo + w.width),
                    0.0,
                    (false, true),
                )
            } else if w.is_bounded_below() {
                (support_lo, half, 0.0, (false, true))
            } else {
                (-half, half, 0.0, (true, true))
            }
        }
    };

    let pieces = 1 + rays.0 as usize + rays.1 as usize;
    let tol = opts.tolerance(pieces);
    let mut budget = opts.max_evaluations;
    let mut evaluations = 0;
    let mut error = clipped_mass;

    // about one panel per oscillation to start with
    let panels = (((hi - lo) * t / (2.0 * PI)).ceil() as usize)
        .max(4)
        .min((budget / 60).max(1));
    let fail = |e: Estimate, tol: Tolerance| non_convergence(t, e, tol.target(e.value));
    let body = integrate(kernel, &uniform_breaks(lo, hi, panels), tol, budget)
        .map_err(|e| fail(e, tol))?;
    let mut value = body.value;
    error += body.error;
    evaluations += body.evaluations;
    budget = budget.saturating_sub(body.evaluations);

    let scale = hi.abs() + w.width;
    if rays.1 {
        // ∫_U^∞ = −i e^{-iUt} ∫₀^∞ w(U − is) e^{-st} ds
        let ray = |s: f64| {
            w.envelope_complex(Complex64::new(hi, -s))
                .expect("analytic tail")
        };
        let est = laplace(ray, t, scale, tol, budget).map_err(|e| fail(e, tol))?;
        value += Complex64::new(0.0, -1.0) * Complex64::new(0.0, -hi * t).exp() * est.value;
        error += est.error;
        evaluations += est.evaluations;
        budget = budget.saturating_sub(est.evaluations);
    }
    if rays.0 {
        // ∫_{-∞}^{-U} = i e^{iUt} ∫₀^∞ w(−U − is) e^{-st} ds
        let ray = |s: f64| {
            w.envelope_complex(Complex64::new(lo, -s))
                .expect("analytic tail")
        };
        let est = laplace(ray, t, scale, tol, budget).map_err(|e| fail(e, tol))?;
        value += Complex64::new(0.0, 1.0) * Complex64::new(0.0, -lo * t).exp() * est.value;
        error += est.error;
        evaluations += est.evaluations;
    }

    Ok(OscillatoryResult {
        value: carrier(w, t) * value,
        abs_error_estimate: error,
        evaluations,
        method: Method::PhaseExtractedAdaptive,
    })
}

/// Real-axis window integral of the envelope at any real `t`, without the
/// tail treatment; used to check conjugate symmetry directly.
#[cfg(test)]
pub(crate) fn window_integral(w: &MassDistribution, t: f64, lo: f64, hi: f64) -> Complex64 {
    let kernel = |u: f64| Complex64::new(0.0, -u * t).exp() * w.envelope(u);
    let tol = Tolerance {
        abs: 1e-14,
        rel: 0.0,
    };
    let est = integrate(kernel, &uniform_breaks(lo, hi, 64), tol, 10_000_000).unwrap_or_else(|e| e);
    carrier(w, t) * est.value
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tight() -> QuadOptions {
        QuadOptions {
            abs_tol: 1e-13,
            ..QuadOptions::default()
        }
    }

    #[test]
    fn closed_form_breit_wigner() {
        let bw = MassDistribution::breit_wigner(1.0, 1.0).unwrap();
        let r = fourier_point(&bw, 2.0).unwrap();
        assert_eq!(r.method, Method::ClosedForm);
        assert_relative_eq!(r.value.norm(), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(r.value.norm(), 0.367879, epsilon = 1e-6);
    }

    #[test]
    fn zero_time_is_exactly_one() {
        for w in [
            MassDistribution::gaussian(1.0, 0.1).unwrap(),
            MassDistribution::breit_wigner_truncated(1.0, 0.1, 0.0).unwrap(),
        ] {
            let r = fourier_point_with(&w, 0.0, &QuadOptions::default().numeric()).unwrap();
            assert_eq!(r.value, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn numeric_breit_wigner_matches_closed_form() {
        for width in [1e-3, 1.0, 1e3] {
            let bw = MassDistribution::breit_wigner(50.0 * width, width).unwrap();
            for gt in [0.01, 0.5, 1.0, 3.0, 10.0, 20.0, 200.0] {
                let t = gt / width;
                let num = fourier_point_with(&bw, t, &tight().numeric()).unwrap();
                assert_eq!(num.method, Method::PhaseExtractedAdaptive);
                let exact = closed_form(&bw, t).unwrap();
                let diff = (num.value - exact).norm();
                assert!(diff < 1e-12, "Γ={width} Γt={gt}: diff {diff:e}");
                assert!(
                    diff <= num.abs_error_estimate + 1e-15,
                    "Γt={gt}: {diff:e} > {:e}",
                    num.abs_error_estimate
                );
            }
        }
    }

    #[test]
    fn numeric_gaussian_matches_closed_form() {
        let g = MassDistribution::gaussian(3.0, 0.1).unwrap();
        for t in [0.1, 1.0, 10.0, 50.0, 500.0] {
            let num = fourier_point_with(&g, t, &tight().numeric()).unwrap();
            let exact = closed_form(&g, t).unwrap();
            assert!((num.value - exact).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn truncated_real_axis_agrees_with_steepest_descent() {
        let bw = MassDistribution::breit_wigner_truncated(1.0, 0.1, 0.0).unwrap();
        for t in [0.3, 1.0, 5.0, 20.0, 100.0] {
            let sd = fourier_point_with(&bw, t, &tight()).unwrap();
            assert_eq!(sd.method, Method::SteepestDescent);
            let ra = fourier_point_with(&bw, t, &tight().numeric()).unwrap();
            assert_eq!(ra.method, Method::PhaseExtractedAdaptive);
            let diff = (sd.value - ra.value).norm();
            assert!(diff < 1e-12, "t={t}: {diff:e}");
        }
    }

    #[test]
    fn threshold_close_to_peak() {
        let bw = MassDistribution::breit_wigner_truncated(1.0, 0.5, 0.9).unwrap();
        for t in [0.5, 4.0, 40.0] {
            let sd = fourier_point_with(&bw, t, &tight()).unwrap();
            let ra = fourier_point_with(&bw, t, &tight().numeric()).unwrap();
            assert!((sd.value - ra.value).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn conjugate_symmetry_on_the_real_axis() {
        let g = MassDistribution::gaussian(2.0, 0.3).unwrap();
        for t in [0.7, 3.0, 11.0] {
            let plus = window_integral(&g, t, -3.0, 3.0);
            let minus = window_integral(&g, -t, -3.0, 3.0);
            assert!((minus - plus.conj()).norm() < 1e-13);
        }
        let bw = MassDistribution::breit_wigner_truncated(1.0, 0.1, 0.0).unwrap();
        let r = fourier_signed(&bw, -5.0, &QuadOptions::default()).unwrap();
        let s = fourier_signed(&bw, 5.0, &QuadOptions::default()).unwrap();
        assert_eq!(r.value, s.value.conj());
    }

    #[test]
    fn modulus_bounded_by_one() {
        let bw = MassDistribution::breit_wigner_truncated(1.0, 0.4, 0.2).unwrap();
        for t in [1e-6, 1e-3, 0.1, 1.0, 10.0, 1e3, 1e5] {
            let r = fourier_point(&bw, t).unwrap();
            assert!(r.value.norm() <= 1.0 + r.abs_error_estimate, "t={t}");
        }
    }

    #[test]
    fn negative_time_is_rejected() {
        let g = MassDistribution::gaussian(1.0, 0.1).unwrap();
        assert!(fourier_point(&g, -1.0).is_err());
        assert!(fourier_point(&g, f64::NAN).is_err());
    }

    #[test]
    fn tiny_budget_fails_loudly() {
        let bw = MassDistribution::breit_wigner_truncated(1.0, 0.1, 0.0).unwrap();
        let opts = QuadOptions {
            abs_tol: 1e-15,
            max_evaluations: 100,
            force_numeric: true,
            ..QuadOptions::default()
        };
        assert!(matches!(
            fourier_point_with(&bw, 50.0, &opts),
            Err(Error::QuadratureNonConvergence { .. })
        ));
    }

    #[test]
    fn grid_points() {
        let g = TimeGrid::uniform(0.0, 5.0, 6).unwrap();
        assert_eq!(g.points(), vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let l = TimeGrid::log(1.0, 1000.0, 4).unwrap();
        let p = l.points();
        assert_eq!(p[0], 1.0);
        assert_eq!(p[3], 1000.0);
        assert_relative_eq!(p[1], 10.0, max_relative = 1e-14);
        assert!(TimeGrid::log(0.0, 1.0, 4).is_err());
        assert!(TimeGrid::uniform(1.0, 1.0, 4).is_err());
        assert!(TimeGrid::uniform(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn grid_of_closed_form_values() {
        let bw = MassDistribution::breit_wigner(1.0, 1.0).unwrap();
        let res = fourier_grid(&bw, &TimeGrid::uniform(0.0, 5.0, 6).unwrap()).unwrap();
        for (i, r) in res.iter().enumerate() {
            assert_relative_eq!(
                r.value.norm(),
                (-0.5 * i as f64).exp(),
                max_relative = 1e-15
            );
        }
        let two = fourier_grid(&bw, &TimeGrid::uniform(0.0, 1e-9, 2).unwrap()).unwrap();
        assert_eq!(two[0].value, Complex64::new(1.0, 0.0));
    }
}
