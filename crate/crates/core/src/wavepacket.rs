//! Survival probability of a boosted Gaussian wave packet.
//!
//! Integrating `|A(t, x)|²` over space turns the spatial integral into a
//! momentum delta that ties `p'∥ = p∥ + v(m − m')`. What is left is a
//! double mass integral
//!
//! ```text
//! N(τ) = ∫∫ dm dm' w(m) w(m') e^{-i(m − m')τ} I(v(m − m')),   τ = t/γ,
//! ```
//!
//! with the packet overlap `I(δ) = ∫ dᵈp n(p) n(p + δ ê∥)`, and the
//! survival probability is `N(t/γ) / N(0)`. For a Gaussian packet
//! `I(δ)/I(0) = exp(−δ²/4σ_p²)` is itself the characteristic function of a
//! centred normal variable `k` with variance `s² = v²/(2σ_p²)`, so
//!
//! ```text
//! N(τ)/I(0) = E_k[ |F(τ − k)|² ] = E_k[ P₀(τ − k) ],
//! ```
//!
//! i.e. the exact result is the rest-frame curve blurred in time by `s` and
//! read at `t/γ`. [`survival_wavepacket_exact`] evaluates that
//! one-dimensional smoothing; [`double_mass`] evaluates `N` as a literal
//! tensor-product quadrature; [`brute_force_spatial`] skips the reduction
//! altogether and integrates `|A(t, x)|²` on an x-grid.
//!
//! Setting `I(δ) ≈ I(0)` gives `P(t) = P₀(t/γ)` ([`survival_wavepacket_approx`]).
//! For light-tailed mass distributions the error of that step is of order
//! `(vΓ/2σ_p)²`. Breit-Wigner lineshapes have no second moment and the
//! error is linear instead, `≈ v Γ/(√π σ_p)`.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::{probability_at, Boost, SurvivalCurve, Treatment};
use crate::error::{invalid, Error, Result};
use crate::masspec::{Family, MassDistribution};
use crate::quadrature::gk::{integrate, uniform_breaks, Tolerance};
use crate::quadrature::{oracle, QuadOptions, TimeGrid};
use crate::regimes::{check_regime, RegimeReport, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PacketShape {
    Gaussian,
}

/// Isotropic rest-frame momentum distribution with zero mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumPacket {
    pub sigma_p: f64,
    pub shape: PacketShape,
}

impl MomentumPacket {
    pub fn gaussian(sigma_p: f64) -> Result<Self> {
        if !(sigma_p.is_finite() && sigma_p > 0.0) {
            return Err(invalid(
                "sigma_p",
                format!("must be finite and > 0, got {sigma_p}"),
            ));
        }
        Ok(Self {
            sigma_p,
            shape: PacketShape::Gaussian,
        })
    }

    /// `|φ(p)|²` along one axis.
    pub fn axis_density(&self, p: f64) -> f64 {
        let z = p / self.sigma_p;
        (-0.5 * z * z).exp() / (self.sigma_p * (2.0 * PI).sqrt())
    }

    /// `|φ(p)|²` in three dimensions.
    pub fn density(&self, p: [f64; 3]) -> f64 {
        p.iter().map(|&c| self.axis_density(c)).product()
    }

    /// `φ(p) = (2π)^{-3/4} σ_p^{-3/2} exp(−p²/4σ_p²)`.
    pub fn amplitude(&self, p: [f64; 3]) -> f64 {
        let p2: f64 = p.iter().map(|c| c * c).sum();
        (2.0 * PI).powf(-0.75)
            * self.sigma_p.powf(-1.5)
            * (-p2 / (4.0 * self.sigma_p * self.sigma_p)).exp()
    }

    /// Standard deviation of the time blur `k` in the exact result.
    pub fn blur_width(&self, v: f64) -> f64 {
        v / (std::f64::consts::SQRT_2 * self.sigma_p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavepacketScenario {
    pub dist: MassDistribution,
    pub packet: MomentumPacket,
    pub boost: Boost,
    pub dimension: usize,
    pub regime: RegimeReport,
}

impl WavepacketScenario {
    /// Logs a warning, but does not fail, when the measurability conditions are violated.
    pub fn new(
        dist: MassDistribution,
        packet: MomentumPacket,
        boost: Boost,
        dimension: usize,
    ) -> Result<Self> {
        if !(dimension == 1 || dimension == 3) {
            return Err(Error::UnsupportedDimension(dimension));
        }
        let regime = check_regime(dist.mass, dist.width, packet.sigma_p, boost.v)?;
        if regime.verdict != Verdict::Ok {
            log::warn!(
                "wave packet outside the narrow-width regime: Γ/σ_p = {:.3e}, σ_p/M = {:.3e} ({:?})",
                regime.ratio_width,
                regime.ratio_packet,
                regime.verdict
            );
        }
        Ok(Self {
            dist,
            packet,
            boost,
            dimension,
            regime,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzImage {
    pub energy: f64,
    pub k_parallel: f64,
    pub k_perp: [f64; 2],
}

/// Boosts the rest-frame momentum `p` of mass `m` along `ê∥`. With
/// `approximate` the rest-frame energy is replaced by `m`.
pub fn lorentz_map(
    m: f64,
    p_parallel: f64,
    p_perp: [f64; 2],
    boost: &Boost,
    approximate: bool,
) -> Result<LorentzImage> {
    if !(m.is_finite() && m > 0.0) {
        return Err(invalid("m", format!("must be finite and > 0, got {m}")));
    }
    let rest_energy = if approximate {
        m
    } else {
        (m * m + p_parallel * p_parallel + p_perp[0] * p_perp[0] + p_perp[1] * p_perp[1]).sqrt()
    };
    Ok(LorentzImage {
        energy: boost.gamma * (rest_energy + boost.v * p_parallel),
        k_parallel: boost.gamma * (p_parallel + boost.v * rest_energy),
        k_perp: p_perp,
    })
}

/// `I(δ) = ∫ dᵈp n(p) n(p + δ ê∥) = (4πσ_p²)^{-d/2} exp(−δ²/4σ_p²)`.
pub fn overlap_factor(packet: &MomentumPacket, delta: f64, dimension: usize) -> Result<f64> {
    if !(1..=3).contains(&dimension) {
        return Err(Error::UnsupportedDimension(dimension));
    }
    match packet.shape {
        PacketShape::Gaussian => {
            let s2 = packet.sigma_p * packet.sigma_p;
            Ok((4.0 * PI * s2).powf(-0.5 * dimension as f64) * (-delta * delta / (4.0 * s2)).exp())
        }
    }
}

/// `I(δ)/I(0)`, independent of the dimension.
pub fn overlap_ratio(packet: &MomentumPacket, delta: f64) -> f64 {
    let s = delta / packet.sigma_p;
    (-0.25 * s * s).exp()
}

// Blur kernel window in standard deviations; the clipped mass is 2e-19.
const BLUR_WINDOW_SIGMAS: f64 = 9.0;

/// `E_k[P₀(τ − k)]` with `k ~ N(0, s²)`, with an error estimate.
pub fn blurred_rest_probability(
    w: &MassDistribution,
    tau: f64,
    s: f64,
    opts: &QuadOptions,
) -> Result<(f64, f64)> {
    if s == 0.0 {
        return probability_at(w, tau, opts);
    }
    let half = BLUR_WINDOW_SIGMAS * s;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let worst_inner = Cell::new(0.0f64);
    let norm = 1.0 / (s * (2.0 * PI).sqrt());
    let integrand = |k: f64| {
        if failure.borrow().is_some() {
            return Complex64::default();
        }
        let z = k / s;
        let kernel = norm * (-0.5 * z * z).exp();
        match probability_at(w, tau - k, opts) {
            Ok((p, e)) => {
                worst_inner.set(worst_inner.get().max(e));
                Complex64::new(kernel * p, 0.0)
            }
            Err(err) => {
                *failure.borrow_mut() = Some(err);
                Complex64::default()
            }
        }
    };
    let mut breaks = uniform_breaks(-half, half, 16);
    // P₀ may have a cusp at zero time, i.e. at k = τ
    if tau > -half && tau < half && !breaks.contains(&tau) {
        breaks.push(tau);
        breaks.sort_by(f64::total_cmp);
    }
    let tol = Tolerance {
        abs: opts.abs_tol,
        rel: opts.rel_tol,
    };
    let est = integrate(integrand, &breaks, tol, opts.max_evaluations);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let est = est.map_err(|e| Error::QuadratureNonConvergence {
        t: tau,
        achieved: e.error,
        target: tol.target(e.value),
        evaluations: e.evaluations,
    })?;
    Ok((est.value.re, est.error + worst_inner.get()))
}

pub fn survival_wavepacket_exact(
    scn: &WavepacketScenario,
    grid: &TimeGrid,
) -> Result<SurvivalCurve> {
    survival_wavepacket_exact_with(scn, grid, &QuadOptions::default())
}

pub fn survival_wavepacket_exact_with(
    scn: &WavepacketScenario,
    grid: &TimeGrid,
    opts: &QuadOptions,
) -> Result<SurvivalCurve> {
    grid.validate()?;
    let s = scn.packet.blur_width(scn.boost.v);
    let (norm, norm_err) = blurred_rest_probability(&scn.dist, 0.0, s, opts)?;
    let points = crate::map_points(&grid.points(), |&t| {
        if t == 0.0 {
            return Ok((1.0, 0.0));
        }
        let (num, num_err) = blurred_rest_probability(&scn.dist, t / scn.boost.gamma, s, opts)?;
        let p = num / norm;
        Ok((p, (num_err + p * norm_err) / norm))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SurvivalCurve::from_points(
        grid,
        Treatment::WavepacketExact,
        points,
    ))
}

/// Narrow-width limit: `|F(t/γ)|²`.
pub fn survival_wavepacket_approx(
    scn: &WavepacketScenario,
    grid: &TimeGrid,
) -> Result<SurvivalCurve> {
    survival_wavepacket_approx_with(scn, grid, &QuadOptions::default())
}

pub fn survival_wavepacket_approx_with(
    scn: &WavepacketScenario,
    grid: &TimeGrid,
    opts: &QuadOptions,
) -> Result<SurvivalCurve> {
    grid.validate()?;
    let gamma = scn.boost.gamma;
    let points = crate::map_points(&grid.points(), |&t| {
        probability_at(&scn.dist, t / gamma, opts)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SurvivalCurve::from_points(
        grid,
        Treatment::WavepacketApprox,
        points,
    ))
}

/// `∫∫ dm dm' w(m) w(m') e^{-i(m − m')τ} ratio(m − m')` as a literal
/// tensor-product sum over composite 7-point Gauss nodes on `M ± 9σ_m`.
///
/// Only the Gaussian family is light-tailed enough for this; `ratio` is
/// usually `|δ| ↦ overlap_ratio(packet, v δ)` or `|_| 1`.
pub fn double_mass<R>(w: &MassDistribution, tau: f64, ratio: R) -> Result<f64>
where
    R: Fn(f64) -> f64,
{
    let Family::Gaussian { sigma } = w.family else {
        return Err(invalid(
            "family",
            "double-mass quadrature needs the Gaussian family",
        ));
    };
    const GAUSS7: [(f64, f64); 7] = [
        (-0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
        (-0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
        (-0.405_845_151_377_397_2, 0.381_830_050_505_118_9),
        (0.0, 0.417_959_183_673_469_4),
        (0.405_845_151_377_397_2, 0.381_830_050_505_118_9),
        (0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
        (0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
    ];
    let half = 9.0 * sigma;
    let panels = ((2.0 * half * tau.abs() / 0.5).ceil() as usize).max(48);
    let h = 2.0 * half / panels as f64;
    let mut nodes = Vec::with_capacity(7 * panels);
    for k in 0..panels {
        let centre = w.mass - half + (k as f64 + 0.5) * h;
        for &(x, wt) in &GAUSS7 {
            let m = centre + 0.5 * h * x;
            nodes.push((m, 0.5 * h * wt * w.pdf(m)));
        }
    }
    // the summand is Hermitian in (i, j): diagonal plus twice the real upper triangle
    let mut total = 0.0;
    for (i, &(mi, ai)) in nodes.iter().enumerate() {
        let mut row = 0.5 * ai * ratio(0.0);
        for &(mj, aj) in &nodes[i + 1..] {
            let delta = mi - mj;
            row += aj * (delta * tau).cos() * ratio(delta);
        }
        total += 2.0 * ai * row;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGridSpec {
    /// Half-width of the x-window around `vt`, in units of `1/(γσ_p)`.
    pub half_width: f64,
    /// Odd, so that the packet centre is a node.
    pub n_x: usize,
    /// Certified bound on the mass-integral tails left out of the window.
    pub tail_tol: f64,
    /// Largest `h_m · |τ|` allowed on the mass grid.
    pub resolution: f64,
}

impl Default for SpatialGridSpec {
    fn default() -> Self {
        Self {
            half_width: 6.0,
            n_x: 241,
            tail_tol: 1e-7,
            resolution: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialEstimate {
    pub probability: f64,
    pub error_estimate: f64,
    /// `∫ |A(t, x)|² dx` before normalization.
    pub numerator: f64,
    pub denominator: f64,
}

// Leak threshold: |A|² at the window edge relative to its peak.
const LEAK_FRACTION: f64 = 1e-10;

/// Integrates `|A(t, x)|²` over an x-grid, with `A(t, x)` evaluated as a
/// direct sum over mass and parallel-momentum nodes, and normalizes by the
/// same integral at `t = 0`. One spatial dimension only.
pub fn brute_force_spatial(
    scn: &WavepacketScenario,
    t: f64,
    spec: &SpatialGridSpec,
) -> Result<SpatialEstimate> {
    if scn.dimension != 1 {
        return Err(Error::UnsupportedDimension(scn.dimension));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    if spec.n_x < 3 || spec.n_x.is_multiple_of(2) {
        return Err(invalid(
            "n_x",
            format!("must be odd and >= 3, got {}", spec.n_x),
        ));
    }
    let (den, den_err) = spatial_norm(scn, 0.0, spec)?;
    if t == 0.0 {
        return Ok(SpatialEstimate {
            probability: 1.0,
            error_estimate: 0.0,
            numerator: den,
            denominator: den,
        });
    }
    let (num, num_err) = spatial_norm(scn, t, spec)?;
    let p = num / den;
    Ok(SpatialEstimate {
        probability: p,
        error_estimate: (num_err + p * den_err) / den,
        numerator: num,
        denominator: den,
    })
}

/// `∫ |A(t, x)|² dx` with an error estimate.
fn spatial_norm(scn: &WavepacketScenario, t: f64, spec: &SpatialGridSpec) -> Result<(f64, f64)> {
    let Boost { v, gamma } = scn.boost;
    let sigma_p = scn.packet.sigma_p;
    let half = spec.half_width / (gamma * sigma_p);
    let h_x = 2.0 * half / (spec.n_x - 1) as f64;
    let xi: Vec<f64> = (0..spec.n_x).map(|k| -half + k as f64 * h_x).collect();

    // momentum factor Σ_j n(p_j) e^{iγ p_j ξ}, spectrally accurate for a Gaussian
    let p_half = 9.0 * sigma_p;
    let n_p = ((2.0 * p_half * gamma * half / 0.5).ceil() as usize).max(64);
    let h_p = 2.0 * p_half / n_p as f64;
    let p_factor: Vec<f64> = xi
        .iter()
        .map(|&x| {
            (0..n_p)
                .map(|j| {
                    let p = -p_half + (j as f64 + 0.5) * h_p;
                    scn.packet.axis_density(p) * (gamma * p * x).cos()
                })
                .sum::<f64>()
                * h_p
        })
        .collect();

    // mass factor at τ'_k = γ(t − v x_k) = t/γ − γ v ξ_k
    let tau0 = t / gamma - gamma * v * xi[0];
    let dtau = -gamma * v * h_x;
    let tau_max = tau0.abs().max((t / gamma + gamma * v * half).abs());
    let tau_ref = (t / gamma).max(v / sigma_p);
    let win = oracle::oracle_window(&scn.dist, tau_ref, spec.tail_tol);
    let n_m = ((win.width() * tau_max / spec.resolution).ceil() as usize)
        .max((win.width() / scn.dist.width * 8.0).ceil() as usize)
        .max(2000);
    let coarse = mass_sums(&scn.dist, win.lo, win.hi, n_m, tau0, dtau, spec.n_x);
    let fine = mass_sums(&scn.dist, win.lo, win.hi, 2 * n_m, tau0, dtau, spec.n_x);

    let mut total = 0.0;
    let mut err = 0.0;
    let mut peak = 0.0f64;
    let mut density = Vec::with_capacity(spec.n_x);
    for k in 0..spec.n_x {
        let mass = (fine[k] * 4.0 - coarse[k]) / 3.0;
        let tau_k = tau0 + k as f64 * dtau;
        let mass_err = (fine[k] - coarse[k]).norm() / 3.0
            + oracle::outside_bound(&scn.dist, win.lo, win.hi, tau_k);
        let pf2 = p_factor[k] * p_factor[k];
        let d = mass.norm_sqr() * pf2;
        let weight = if k == 0 || k == spec.n_x - 1 {
            0.5
        } else {
            1.0
        };
        total += weight * d;
        err += weight * (2.0 * mass.norm() * mass_err + mass_err * mass_err) * pf2;
        peak = peak.max(d);
        density.push(d);
    }
    let edge = density[0].max(density[spec.n_x - 1]) / peak;
    // NaN counts as a leak
    if edge.is_nan() || edge > LEAK_FRACTION {
        return Err(Error::GridTooSmall {
            edge_fraction: edge,
        });
    }
    Ok((total * h_x, err * h_x))
}

/// `Σ_i h w(m_i) e^{-i m_i (τ₀ + k Δτ)}` for `k < count`, on the midpoint grid.
fn mass_sums(
    w: &MassDistribution,
    lo: f64,
    hi: f64,
    n: usize,
    tau0: f64,
    dtau: f64,
    count: usize,
) -> Vec<Complex64> {
    let h = (hi - lo) / n as f64;
    let mut acc = vec![Complex64::default(); count];
    for i in 0..n {
        let m = lo + (i as f64 + 0.5) * h;
        let c = h * w.pdf(m);
        if c == 0.0 {
            continue;
        }
        let mut z = Complex64::new(0.0, -m * tau0).exp() * c;
        let step = Complex64::new(0.0, -m * dtau).exp();
        for slot in acc.iter_mut() {
            *slot += z;
            z *= step;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::erf::erfc;

    fn scenario(dist: MassDistribution, sigma_p: f64, v: f64, d: usize) -> WavepacketScenario {
        WavepacketScenario::new(
            dist,
            MomentumPacket::gaussian(sigma_p).unwrap(),
            Boost::new(v).unwrap(),
            d,
        )
        .unwrap()
    }

    fn tight() -> QuadOptions {
        QuadOptions {
            abs_tol: 1e-13,
            ..QuadOptions::default()
        }
    }

    /// `E[e^{-Γ|τ − k|}]` for `k ~ N(0, s²)`.
    fn blurred_exponential(width: f64, tau: f64, s: f64) -> f64 {
        let phi = |x: f64| 0.5 * erfc(-x / std::f64::consts::SQRT_2);
        let g = width;
        let a = (-g * tau + 0.5 * g * g * s * s).exp() * phi((tau - g * s * s) / s);
        let b = (g * tau + 0.5 * g * g * s * s).exp() * phi(-(tau + g * s * s) / s);
        a + b
    }

    #[test]
    fn lorentz_map_cases() {
        let b = Boost::new(0.6).unwrap();
        let img = lorentz_map(2.0, 0.0, [0.0, 0.0], &b, false).unwrap();
        assert_relative_eq!(img.energy, 2.5, max_relative = 1e-15);
        assert_relative_eq!(img.k_parallel, 1.5, max_relative = 1e-15);

        let id = lorentz_map(2.0, 0.3, [0.1, -0.2], &Boost::rest(), true).unwrap();
        assert_eq!(
            (id.energy, id.k_parallel, id.k_perp),
            (2.0, 0.3, [0.1, -0.2])
        );

        let approx = lorentz_map(1.0, 0.01, [0.0, 0.0], &b, true).unwrap();
        assert_relative_eq!(approx.energy, 1.2575, max_relative = 1e-14);
        assert_relative_eq!(approx.k_parallel, 0.7625, max_relative = 1e-14);

        // exact map preserves the invariant mass
        let ex = lorentz_map(1.0, 0.3, [0.2, 0.1], &b, false).unwrap();
        let inv = ex.energy.powi(2) - ex.k_parallel.powi(2) - 0.05;
        assert_relative_eq!(inv, 1.0, max_relative = 1e-14);
        assert!(lorentz_map(0.0, 0.0, [0.0; 2], &b, true).is_err());
    }

    #[test]
    fn overlap_factor_matches_grid_oracle() {
        let packet = MomentumPacket::gaussian(1.0).unwrap();
        // 3-D midpoint grid of |φ|⁴ on [-8, 8]³
        let n = 96;
        let h = 16.0 / n as f64;
        let axis: Vec<f64> = (0..n).map(|i| -8.0 + (i as f64 + 0.5) * h).collect();
        let mut sum = 0.0;
        for &x in &axis {
            for &y in &axis {
                for &z in &axis {
                    sum += packet.amplitude([x, y, z]).powi(4);
                }
            }
        }
        let grid = sum * h * h * h;
        let closed = overlap_factor(&packet, 0.0, 3).unwrap();
        assert_relative_eq!(closed, (4.0 * PI).powf(-1.5), max_relative = 1e-15);
        assert_relative_eq!(closed, 0.0224484, epsilon = 1e-7);
        assert_relative_eq!(grid, closed, max_relative = 1e-12);

        // shifted overlap on a 1-D grid
        let shifted: f64 = axis
            .iter()
            .map(|&p| packet.axis_density(p) * packet.axis_density(p + 2.0))
            .sum::<f64>()
            * h;
        let i0 = overlap_factor(&packet, 0.0, 1).unwrap();
        assert_relative_eq!(shifted / i0, (-1.0f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(
            overlap_ratio(&packet, 2.0),
            (-1.0f64).exp(),
            max_relative = 1e-15
        );
        assert!(overlap_factor(&packet, 1e3, 3).unwrap() == 0.0);
        assert!(overlap_factor(&packet, 0.0, 4).is_err());
    }

    #[test]
    fn packet_moments() {
        let packet = MomentumPacket::gaussian(0.7).unwrap();
        let n = 4000;
        let h = 14.0 / n as f64;
        let (mut norm, mut mean, mut second) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let p = -7.0 + (i as f64 + 0.5) * h;
            let d = packet.axis_density(p);
            norm += d * h;
            mean += d * p * h;
            second += d * p * p * h;
        }
        assert_relative_eq!(norm, 1.0, max_relative = 1e-12);
        assert!(mean.abs() < 1e-15);
        assert_relative_eq!(second, 0.49, max_relative = 1e-12);
        // |φ|² is the product of the per-axis densities
        let p = [0.1, -0.3, 0.5];
        assert_relative_eq!(
            packet.amplitude(p).powi(2),
            packet.density(p),
            max_relative = 1e-14
        );
    }

    #[test]
    fn exact_matches_blurred_exponential() {
        let bw = MassDistribution::breit_wigner(100.0, 0.05).unwrap();
        let scn = scenario(bw, 1.0, 0.8, 3);
        let grid = TimeGrid::uniform(0.0, 60.0, 7).unwrap();
        let curve = survival_wavepacket_exact_with(&scn, &grid, &tight()).unwrap();
        let s = scn.packet.blur_width(0.8);
        let norm = blurred_exponential(0.05, 0.0, s);
        for (t, p, _) in curve.iter() {
            let expected = blurred_exponential(0.05, t / scn.boost.gamma, s) / norm;
            assert_relative_eq!(p, expected, max_relative = 1e-10);
        }
    }

    #[test]
    fn breit_wigner_gap_is_linear_in_width() {
        // Γ/σ_p = 1e-3, v = 0.6, t = 1000: the gap is ≈ vΓ/(√π σ_p) e^{-Γt/γ}, not quadratic
        let bw = MassDistribution::breit_wigner(100.0, 0.001).unwrap();
        let scn = scenario(bw, 1.0, 0.6, 3);
        let grid = TimeGrid::uniform(0.0, 1000.0, 2).unwrap();
        let exact = survival_wavepacket_exact_with(&scn, &grid, &tight())
            .unwrap()
            .values[1];
        let s = scn.packet.blur_width(0.6);
        let closed = blurred_exponential(0.001, 800.0, s) / blurred_exponential(0.001, 0.0, s);
        assert_relative_eq!(exact, closed, max_relative = 1e-10);
        let gap = exact - (-0.8f64).exp();
        let leading = 0.6 * 0.001 / PI.sqrt() * (-0.8f64).exp();
        assert_relative_eq!(gap, leading, max_relative = 2e-3);
    }

    #[test]
    fn exact_matches_double_mass() {
        let g = MassDistribution::gaussian(50.0, 0.2).unwrap();
        let scn = scenario(g, 1.0, 0.9, 3);
        let grid = TimeGrid::uniform(0.0, 20.0, 5).unwrap();
        let curve = survival_wavepacket_exact_with(&scn, &grid, &tight()).unwrap();
        let packet = scn.packet;
        let ratio = |d: f64| overlap_ratio(&packet, 0.9 * d);
        let norm = double_mass(&g, 0.0, ratio).unwrap();
        for (t, p, _) in curve.iter() {
            let direct = double_mass(&g, t / scn.boost.gamma, ratio).unwrap() / norm;
            assert!((p - direct).abs() < 1e-11, "t={t}: {p} vs {direct}");
        }
    }

    #[test]
    fn zero_velocity_exact_is_rest() {
        let w = MassDistribution::breit_wigner_truncated(1.0, 0.1, 0.0).unwrap();
        let scn = scenario(w, 10.0, 0.0, 3);
        let grid = TimeGrid::uniform(0.0, 40.0, 5).unwrap();
        let exact = survival_wavepacket_exact(&scn, &grid).unwrap();
        let rest = crate::amplitude::survival_rest(&w, &grid).unwrap();
        assert_eq!(exact.values, rest.values);
        let approx = survival_wavepacket_approx(&scn, &grid).unwrap();
        assert_eq!(approx.values, rest.values);
    }

    #[test]
    fn approx_is_time_dilated_rest() {
        let bw = MassDistribution::breit_wigner(1.0, 1.0).unwrap();
        let scn = scenario(bw, 100.0, 0.6, 3);
        let c = survival_wavepacket_approx(&scn, &TimeGrid::uniform(0.0, 1.0, 2).unwrap()).unwrap();
        assert_eq!(c.values[0], 1.0);
        assert_relative_eq!(c.values[1], 0.449329, epsilon = 1e-6);
    }

    #[test]
    fn double_mass_rejects_heavy_tails() {
        let bw = MassDistribution::breit_wigner(1.0, 1.0).unwrap();
        assert!(double_mass(&bw, 1.0, |_| 1.0).is_err());
    }

    #[test]
    fn brute_force_normalization() {
        let g = MassDistribution::gaussian(100.0, 0.01).unwrap();
        let scn = scenario(g, 1.0, 0.0, 1);
        let t = 100.0;
        let est = brute_force_spatial(&scn, t, &SpatialGridSpec::default()).unwrap();
        assert_relative_eq!(est.probability, (-1.0f64).exp(), epsilon = 1e-4);
        let zero = brute_force_spatial(&scn, 0.0, &SpatialGridSpec::default()).unwrap();
        assert_eq!(zero.probability, 1.0);
    }

    #[test]
    fn brute_force_denominator_matches_reduction() {
        // ∫|A(0,x)|² dx = (2π/γ) I(0) N(0)/I(0) in one dimension
        let g = MassDistribution::gaussian(100.0, 0.05).unwrap();
        let scn = scenario(g, 1.0, 0.6, 1);
        let est = brute_force_spatial(&scn, 0.0, &SpatialGridSpec::default()).unwrap();
        let i0 = overlap_factor(&scn.packet, 0.0, 1).unwrap();
        let (blur, _) =
            blurred_rest_probability(&g, 0.0, scn.packet.blur_width(0.6), &tight()).unwrap();
        let reduced = 2.0 * PI / scn.boost.gamma * i0 * blur;
        assert_relative_eq!(est.denominator, reduced, max_relative = 1e-6);
    }

    #[test]
    fn brute_force_matches_exact_for_truncated_lineshape() {
        let w = MassDistribution::breit_wigner_truncated(100.0, 0.1, 0.0).unwrap();
        let scn = scenario(w, 1.0, 0.6, 1);
        let t = 50.0;
        let brute = brute_force_spatial(&scn, t, &SpatialGridSpec::default()).unwrap();
        let exact = survival_wavepacket_exact(&scn, &TimeGrid::uniform(0.0, t, 2).unwrap())
            .unwrap()
            .values[1];
        assert!(
            (brute.probability - exact).abs() < 1e-4,
            "{} vs {exact}",
            brute.probability
        );
    }

    #[test]
    fn brute_force_needs_one_dimension_and_a_wide_window() {
        let g = MassDistribution::gaussian(100.0, 0.05).unwrap();
        let scn3 = scenario(g, 1.0, 0.6, 3);
        assert!(matches!(
            brute_force_spatial(&scn3, 1.0, &SpatialGridSpec::default()),
            Err(Error::UnsupportedDimension(3))
        ));
        let scn = scenario(g, 1.0, 0.6, 1);
        let narrow = SpatialGridSpec {
            half_width: 2.0,
            ..SpatialGridSpec::default()
        };
        assert!(matches!(
            brute_force_spatial(&scn, 1.0, &narrow),
            Err(Error::GridTooSmall { .. })
        ));
    }
}
