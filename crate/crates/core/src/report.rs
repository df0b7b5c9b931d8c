//! CSV and JSON tables of survival curves, and curve comparisons.
//!
//! CSV numbers are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` bit for bit.

use std::io::{self, Write};

use serde::Serialize;

use crate::amplitude::{SurvivalCurve, Treatment};
use crate::error::{invalid, Result};
use crate::regimes::RegimeReport;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub tool_version: String,
    pub scenario_name: String,
    pub scenario_sha256: String,
    pub unit_note: Option<String>,
    pub abs_tol: f64,
    pub regime: Option<RegimeReport>,
}

/// Formats a value with 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn check_aligned(curves: &[SurvivalCurve]) -> Result<()> {
    let Some(first) = curves.first() else {
        return Err(invalid("curves", "nothing to write"));
    };
    if curves.iter().any(|c| c.times != first.times) {
        return Err(invalid("curves", "curves are sampled on different grids"));
    }
    Ok(())
}

/// `# key: value` metadata lines, a header row, then one row per time.
pub fn write_csv<W: Write>(
    out: &mut W,
    meta: &RunMetadata,
    curves: &[SurvivalCurve],
) -> Result<()> {
    check_aligned(curves)?;
    write_csv_inner(out, meta, curves).map_err(|e| invalid("output", e.to_string()))
}

fn write_csv_inner<W: Write>(
    out: &mut W,
    meta: &RunMetadata,
    curves: &[SurvivalCurve],
) -> io::Result<()> {
    writeln!(out, "# tool: {}", meta.tool_version)?;
    writeln!(out, "# scenario: {}", meta.scenario_name)?;
    writeln!(out, "# scenario_sha256: {}", meta.scenario_sha256)?;
    if let Some(note) = &meta.unit_note {
        writeln!(out, "# unit_note: {}", note.replace('\n', " "))?;
    }
    writeln!(out, "# abs_tol: {:e}", meta.abs_tol)?;
    match &meta.regime {
        Some(r) => writeln!(
            out,
            "# regime: {}",
            serde_json::to_string(r).map_err(io::Error::other)?
        )?,
        None => writeln!(out, "# regime: none")?,
    }
    let mut header = vec!["t".to_owned()];
    for c in curves {
        header.push(c.treatment.key().to_owned());
        header.push(format!("{}_err", c.treatment.key()));
    }
    writeln!(out, "{}", header.join(","))?;
    for (i, &t) in curves[0].times.iter().enumerate() {
        let mut row = vec![format_number(t)];
        for c in curves {
            row.push(format_number(c.values[i]));
            row.push(format_number(c.error_estimates[i]));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct JsonColumn<'a> {
    treatment: &'static str,
    values: &'a [f64],
    error_estimates: &'a [f64],
}

#[derive(Debug, Serialize)]
struct JsonTable<'a> {
    metadata: &'a RunMetadata,
    t: &'a [f64],
    columns: Vec<JsonColumn<'a>>,
}

pub fn write_json<W: Write>(
    out: &mut W,
    meta: &RunMetadata,
    curves: &[SurvivalCurve],
) -> Result<()> {
    check_aligned(curves)?;
    let table = JsonTable {
        metadata: meta,
        t: &curves[0].times,
        columns: curves
            .iter()
            .map(|c| JsonColumn {
                treatment: c.treatment.key(),
                values: &c.values,
                error_estimates: &c.error_estimates,
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *out, &table)
        .map_err(|e| invalid("output", e.to_string()))?;
    writeln!(out).map_err(|e| invalid("output", e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareSummary {
    pub a: Treatment,
    pub b: Treatment,
    pub max_abs_gap: f64,
    pub mean_abs_gap: f64,
    pub t_of_max_gap: f64,
    pub predicted_gap: Option<f64>,
}

pub fn compare_curves(
    a: &SurvivalCurve,
    b: &SurvivalCurve,
    regime: Option<&RegimeReport>,
) -> Result<CompareSummary> {
    if a.times != b.times {
        return Err(invalid("curves", "curves are sampled on different grids"));
    }
    let mut max_abs_gap = 0.0;
    let mut t_of_max_gap = a.times.first().copied().unwrap_or(0.0);
    let mut sum = 0.0;
    for ((&t, x), y) in a.times.iter().zip(&a.values).zip(&b.values) {
        let gap = (x - y).abs();
        sum += gap;
        if gap > max_abs_gap {
            max_abs_gap = gap;
            t_of_max_gap = t;
        }
    }
    Ok(CompareSummary {
        a: a.treatment,
        b: b.treatment,
        max_abs_gap,
        mean_abs_gap: sum / a.len().max(1) as f64,
        t_of_max_gap,
        predicted_gap: regime.map(|r| r.predicted_gap),
    })
}
