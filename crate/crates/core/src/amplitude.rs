//! Rest-frame survival probability and the two single-momentum treatments of
//! a moving system.
//!
//! With `F` the Fourier transform of the mass distribution:
//!
//! * rest frame: `P₀(t) = |F(t)|²`;
//! * time-only boost of the momentum eigenstate: `A(t) = F(γt)`, hence
//!   `P(t) = P₀(γt)`, which runs *faster* than the rest-frame clock;
//! * space-time amplitude `A(t, x) = F(γ(t − v·x))` evaluated on the
//!   trajectory `x = vt`: `γ(t − v²t) = t/γ`, hence `P(t) = P₀(t/γ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::masspec::MassDistribution;
use crate::quadrature::{fourier_signed, oracle, OscillatoryResult, QuadOptions, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boost {
    /// Speed as a fraction of `c`.
    pub v: f64,
    pub gamma: f64,
}

impl Boost {
    pub fn new(v: f64) -> Result<Self> {
        if !(v.is_finite() && (0.0..1.0).contains(&v)) {
            return Err(invalid("v", format!("must satisfy 0 <= v < 1, got {v}")));
        }
        Ok(Self {
            v,
            gamma: 1.0 / ((1.0 - v) * (1.0 + v)).sqrt(),
        })
    }

    pub fn rest() -> Self {
        Self { v: 0.0, gamma: 1.0 }
    }
}

/// Serialized under the same keys as [`Treatment::key`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Treatment {
    #[serde(rename = "rest")]
    Rest,
    #[serde(rename = "naive")]
    NaiveBoost,
    #[serde(rename = "heuristic")]
    HeuristicSpacetime,
    #[serde(rename = "wp_exact")]
    WavepacketExact,
    #[serde(rename = "wp_approx")]
    WavepacketApprox,
    /// Rest frame through the midpoint oracle instead of the engine.
    #[serde(rename = "oracle")]
    RestOracle,
}

impl Treatment {
    pub const ALL: [Treatment; 6] = [
        Treatment::Rest,
        Treatment::NaiveBoost,
        Treatment::HeuristicSpacetime,
        Treatment::WavepacketExact,
        Treatment::WavepacketApprox,
        Treatment::RestOracle,
    ];

    /// Short name used in scenario files and column headers.
    pub fn key(&self) -> &'static str {
        match self {
            Treatment::Rest => "rest",
            Treatment::NaiveBoost => "naive",
            Treatment::HeuristicSpacetime => "heuristic",
            Treatment::WavepacketExact => "wp_exact",
            Treatment::WavepacketApprox => "wp_approx",
            Treatment::RestOracle => "oracle",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.key() == key)
    }

    pub fn needs_packet(&self) -> bool {
        matches!(
            self,
            Treatment::WavepacketExact | Treatment::WavepacketApprox
        )
    }
}

impl std::fmt::Display for Treatment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    pub grid: TimeGrid,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub treatment: Treatment,
}

impl SurvivalCurve {
    pub(crate) fn from_points(
        grid: &TimeGrid,
        treatment: Treatment,
        points: Vec<(f64, f64)>,
    ) -> Self {
        let (values, error_estimates) = points.into_iter().unzip();
        Self {
            grid: *grid,
            times: grid.points(),
            values,
            error_estimates,
            treatment,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.values)
            .zip(&self.error_estimates)
            .map(|((&t, &p), &e)| (t, p, e))
    }
}

/// Survival probability `|F(τ)|²` at a rescaled time, with propagated error.
pub(crate) fn probability_at(
    w: &MassDistribution,
    tau: f64,
    opts: &QuadOptions,
) -> Result<(f64, f64)> {
    fourier_signed(w, tau, opts).map(|r| r.probability())
}

fn rescaled_curve(
    w: &MassDistribution,
    grid: &TimeGrid,
    treatment: Treatment,
    scale: f64,
    opts: &QuadOptions,
) -> Result<SurvivalCurve> {
    grid.validate()?;
    let points = crate::map_points(&grid.points(), |&t| probability_at(w, scale * t, opts))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SurvivalCurve::from_points(grid, treatment, points))
}

pub fn survival_rest(w: &MassDistribution, grid: &TimeGrid) -> Result<SurvivalCurve> {
    survival_rest_with(w, grid, &QuadOptions::default())
}

pub fn survival_rest_with(
    w: &MassDistribution,
    grid: &TimeGrid,
    opts: &QuadOptions,
) -> Result<SurvivalCurve> {
    rescaled_curve(w, grid, Treatment::Rest, 1.0, opts)
}

/// `|F(γt)|²`.
pub fn survival_naive_boost(
    w: &MassDistribution,
    boost: &Boost,
    grid: &TimeGrid,
) -> Result<SurvivalCurve> {
    survival_naive_boost_with(w, boost, grid, &QuadOptions::default())
}

pub fn survival_naive_boost_with(
    w: &MassDistribution,
    boost: &Boost,
    grid: &TimeGrid,
    opts: &QuadOptions,
) -> Result<SurvivalCurve> {
    rescaled_curve(w, grid, Treatment::NaiveBoost, boost.gamma, opts)
}

/// `|A(t, vt)|² = |F(t/γ)|²`.
pub fn survival_heuristic(
    w: &MassDistribution,
    boost: &Boost,
    grid: &TimeGrid,
) -> Result<SurvivalCurve> {
    survival_heuristic_with(w, boost, grid, &QuadOptions::default())
}

pub fn survival_heuristic_with(
    w: &MassDistribution,
    boost: &Boost,
    grid: &TimeGrid,
    opts: &QuadOptions,
) -> Result<SurvivalCurve> {
    grid.validate()?;
    let points = crate::map_points(&grid.points(), |&t| {
        spacetime_amplitude_with(w, boost, t, boost.v * t, opts).map(|r| r.probability())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SurvivalCurve::from_points(
        grid,
        Treatment::HeuristicSpacetime,
        points,
    ))
}

/// `A(t, x∥) = F(γ(t − v x∥))`.
pub fn spacetime_amplitude(
    w: &MassDistribution,
    boost: &Boost,
    t: f64,
    x_parallel: f64,
) -> Result<OscillatoryResult> {
    spacetime_amplitude_with(w, boost, t, x_parallel, &QuadOptions::default())
}

pub fn spacetime_amplitude_with(
    w: &MassDistribution,
    boost: &Boost,
    t: f64,
    x_parallel: f64,
    opts: &QuadOptions,
) -> Result<OscillatoryResult> {
    if !(t.is_finite() && x_parallel.is_finite()) {
        return Err(invalid("t", "time and position must be finite"));
    }
    // γ(t − v²t) loses t/γ to cancellation as v → 1; use the exact form on the trajectory
    let arg = if x_parallel == boost.v * t {
        t / boost.gamma
    } else {
        boost.gamma * (t - boost.v * x_parallel)
    };
    fourier_signed(w, arg, opts)
}

/// Rest-frame curve computed with the midpoint oracle.
pub fn survival_rest_oracle(
    w: &MassDistribution,
    grid: &TimeGrid,
    cfg: &oracle::OracleConfig,
) -> Result<SurvivalCurve> {
    grid.validate()?;
    let points = crate::map_points(&grid.points(), |&t| {
        if t == 0.0 {
            return Ok((1.0, 0.0));
        }
        oracle::riemann_oracle_auto(w, t, cfg, 8).map(|r| r.probability())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SurvivalCurve::from_points(
        grid,
        Treatment::RestOracle,
        points,
    ))
}

/// Rest-frame amplitude `A₀(t) = F(t)`.
pub fn rest_amplitude(w: &MassDistribution, t: f64) -> Result<Complex64> {
    crate::quadrature::fourier_point(w, t).map(|r| r.value)
}
