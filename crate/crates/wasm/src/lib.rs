//! Browser bindings. Curves come back as one flat `Float64Array`: the time
//! axis followed by one block of `n` values per curve.

use decay_core::amplitude::{survival_heuristic, survival_naive_boost, survival_rest};
use decay_core::regimes::check_regime;
use decay_core::wavepacket::{survival_wavepacket_approx, survival_wavepacket_exact};
use decay_core::{
    Boost, MassDistribution, MomentumPacket, SurvivalCurve, TimeGrid, WavepacketScenario,
};
use wasm_bindgen::prelude::*;

// Interactive budget; keeps a redraw under a second.
const MAX_POINTS: usize = 2000;

/// `family` is `breit_wigner`, `breit_wigner_truncated` or `gaussian`;
/// `width` is Γ, or σ for the Gaussian.
pub fn distribution(
    family: &str,
    mass: f64,
    width: f64,
    threshold: f64,
) -> Result<MassDistribution, String> {
    match family {
        "breit_wigner" => MassDistribution::breit_wigner(mass, width),
        "breit_wigner_truncated" => {
            MassDistribution::breit_wigner_truncated(mass, width, threshold)
        }
        "gaussian" => MassDistribution::gaussian(mass, width),
        other => return Err(format!("unknown family {other:?}")),
    }
    .map_err(|e| e.to_string())
}

fn grid(t_max: f64, n: usize) -> Result<TimeGrid, String> {
    if n > MAX_POINTS {
        return Err(format!("at most {MAX_POINTS} points, got {n}"));
    }
    TimeGrid::uniform(0.0, t_max, n).map_err(|e| e.to_string())
}

fn flatten(curves: &[SurvivalCurve]) -> Vec<f64> {
    let mut out = curves[0].times.clone();
    for c in curves {
        out.extend_from_slice(&c.values);
    }
    out
}

/// `[t; rest; naive; heuristic]`.
pub fn boost_curves(
    family: &str,
    mass: f64,
    width: f64,
    threshold: f64,
    v: f64,
    t_max: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    let w = distribution(family, mass, width, threshold)?;
    let boost = Boost::new(v).map_err(|e| e.to_string())?;
    let g = grid(t_max, n)?;
    let curves = [
        survival_rest(&w, &g),
        survival_naive_boost(&w, &boost, &g),
        survival_heuristic(&w, &boost, &g),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(|e| e.to_string())?;
    Ok(flatten(&curves))
}

/// `[t; exact; approx]`.
#[allow(clippy::too_many_arguments)]
pub fn wavepacket_curves(
    family: &str,
    mass: f64,
    width: f64,
    threshold: f64,
    sigma_p: f64,
    v: f64,
    t_max: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    let w = distribution(family, mass, width, threshold)?;
    let packet = MomentumPacket::gaussian(sigma_p).map_err(|e| e.to_string())?;
    let boost = Boost::new(v).map_err(|e| e.to_string())?;
    let scn = WavepacketScenario::new(w, packet, boost, 3).map_err(|e| e.to_string())?;
    let g = grid(t_max, n)?;
    let exact = survival_wavepacket_exact(&scn, &g).map_err(|e| e.to_string())?;
    let approx = survival_wavepacket_approx(&scn, &g).map_err(|e| e.to_string())?;
    Ok(flatten(&[exact, approx]))
}

/// Regime report as JSON.
pub fn regime_json(mass: f64, width: f64, sigma_p: f64, v: f64) -> Result<String, String> {
    let r = check_regime(mass, width, sigma_p, v).map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = boostCurves)]
pub fn js_boost_curves(
    family: &str,
    mass: f64,
    width: f64,
    threshold: f64,
    v: f64,
    t_max: f64,
    n: usize,
) -> Result<Vec<f64>, JsValue> {
    boost_curves(family, mass, width, threshold, v, t_max, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = wavepacketCurves)]
#[allow(clippy::too_many_arguments)]
pub fn js_wavepacket_curves(
    family: &str,
    mass: f64,
    width: f64,
    threshold: f64,
    sigma_p: f64,
    v: f64,
    t_max: f64,
    n: usize,
) -> Result<Vec<f64>, JsValue> {
    wavepacket_curves(family, mass, width, threshold, sigma_p, v, t_max, n)
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = regimeReport)]
pub fn js_regime_report(mass: f64, width: f64, sigma_p: f64, v: f64) -> Result<String, JsValue> {
    regime_json(mass, width, sigma_p, v).map_err(|e| JsValue::from_str(&e))
}
