//! Measurability conditions `Γ ≪ σ_p ≪ M`, equivalently `1/M ≪ σ_x ≪ τ`.

use serde::{Deserialize, Serialize};

use crate::amplitude::Boost;
use crate::error::{invalid, Result};
use crate::masspec::MassDistribution;
use crate::quadrature::{QuadOptions, TimeGrid};
use crate::wavepacket::{
    survival_wavepacket_approx_with, survival_wavepacket_exact_with, MomentumPacket,
    WavepacketScenario,
};

/// `ħc` in MeV·fm.
pub const HBAR_C_MEV_FM: f64 = 197.326_980_4;

/// Momentum spread in MeV of a minimum-uncertainty packet of size `sigma_x_fm`.
pub fn sigma_p_from_length_fm(sigma_x_fm: f64) -> f64 {
    HBAR_C_MEV_FM / sigma_x_fm
}

/// Upper bounds on a ratio for the `ok` and `marginal` verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeThresholds {
    pub ok: f64,
    pub marginal: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            ok: 0.01,
            marginal: 0.1,
        }
    }
}

impl RegimeThresholds {
    pub fn classify(&self, ratio: f64) -> Verdict {
        if ratio < self.ok {
            Verdict::Ok
        } else if ratio < self.marginal {
            Verdict::Marginal
        } else {
            Verdict::Violated
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ok,
    Marginal,
    Violated,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Ok => "ok",
            Verdict::Marginal => "marginal",
            Verdict::Violated => "violated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    /// `Γ/σ_p`
    pub ratio_width: f64,
    /// `σ_p/M`
    pub ratio_packet: f64,
    /// `1/σ_p`
    pub sigma_x: f64,
    /// `1/Γ`
    pub tau: f64,
    pub width_verdict: Verdict,
    pub packet_verdict: Verdict,
    /// The worse of the two.
    pub verdict: Verdict,
    /// `(vΓ/2σ_p)²`, the leading exact-vs-approximate discrepancy for a
    /// lineshape with finite variance.
    pub predicted_gap: f64,
}

pub fn check_regime(mass: f64, width: f64, sigma_p: f64, v: f64) -> Result<RegimeReport> {
    check_regime_with(mass, width, sigma_p, v, &RegimeThresholds::default())
}

pub fn check_regime_with(
    mass: f64,
    width: f64,
    sigma_p: f64,
    v: f64,
    thresholds: &RegimeThresholds,
) -> Result<RegimeReport> {
    for (field, value) in [("mass", mass), ("width", width), ("sigma_p", sigma_p)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(invalid(
                field,
                format!("must be finite and > 0, got {value}"),
            ));
        }
    }
    Boost::new(v)?;
    let ratio_width = width / sigma_p;
    let ratio_packet = sigma_p / mass;
    let width_verdict = thresholds.classify(ratio_width);
    let packet_verdict = thresholds.classify(ratio_packet);
    Ok(RegimeReport {
        ratio_width,
        ratio_packet,
        sigma_x: 1.0 / sigma_p,
        tau: 1.0 / width,
        width_verdict,
        packet_verdict,
        verdict: width_verdict.max(packet_verdict),
        predicted_gap: (0.5 * v * ratio_width).powi(2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRow {
    pub sigma_p: f64,
    pub ratio_width: f64,
    /// `max_t |exact − approx|`
    pub measured_gap: f64,
    pub t_of_max: f64,
    pub predicted_gap: f64,
}

/// Exact versus narrow-width wave-packet survival for each packet width.
pub fn gap_scan(
    dist: &MassDistribution,
    sigma_ps: &[f64],
    v: f64,
    grid: &TimeGrid,
    opts: &QuadOptions,
) -> Result<Vec<GapRow>> {
    let boost = Boost::new(v)?;
    sigma_ps
        .iter()
        .map(|&sigma_p| {
            let scn = WavepacketScenario::new(*dist, MomentumPacket::gaussian(sigma_p)?, boost, 3)?;
            let exact = survival_wavepacket_exact_with(&scn, grid, opts)?;
            let approx = survival_wavepacket_approx_with(&scn, grid, opts)?;
            let (t_of_max, measured_gap) = exact
                .times
                .iter()
                .zip(exact.values.iter().zip(&approx.values))
                .map(|(&t, (a, b))| (t, (a - b).abs()))
                .fold(
                    (0.0, 0.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            Ok(GapRow {
                sigma_p,
                ratio_width: scn.regime.ratio_width,
                measured_gap,
                t_of_max,
                predicted_gap: scn.regime.predicted_gap,
            })
        })
        .collect()
}
