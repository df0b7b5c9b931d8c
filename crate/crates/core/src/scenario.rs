//! TOML scenario files.
//!
//! ```toml
//! name = "boosted-bw"
//! unit_note = "GeV"
//! treatments = ["rest", "naive", "heuristic"]
//! v = 0.6
//!
//! [distribution]
//! family = "breit_wigner"       # or breit_wigner_truncated (+ threshold), gaussian (sigma instead of width)
//! mass = 1.0
//! width = 1.0
//!
//! [packet]                      # required by wp_exact and wp_approx
//! sigma_p = 10.0
//! dimension = 3
//!
//! [grid]
//! t_start = 0.0
//! t_stop = 5.0
//! n_points = 6
//! spacing = "uniform"           # or log
//!
//! [output]
//! path = "boosted-bw.csv"
//! format = "csv"                # or json
//!
//! [quadrature]                  # optional
//! abs_tol = 1e-9
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::amplitude::{self, Boost, SurvivalCurve, Treatment};
use crate::error::{Error, Result};
use crate::masspec::{Family, MassDistribution};
use crate::quadrature::oracle::OracleConfig;
use crate::quadrature::{QuadOptions, Spacing, TimeGrid, DEFAULT_ABS_TOL, DEFAULT_MAX_EVALUATIONS};
use crate::regimes::{check_regime, RegimeReport};
use crate::wavepacket;
use crate::wavepacket::{MomentumPacket, WavepacketScenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit_note: Option<String>,
    treatments: Vec<String>,
    #[serde(default)]
    v: f64,
    distribution: DistributionFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    packet: Option<PacketFile>,
    grid: GridFile,
    #[serde(default)]
    output: OutputFile,
    #[serde(default)]
    quadrature: QuadratureFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum DistributionFile {
    BreitWigner {
        mass: f64,
        width: f64,
    },
    BreitWignerTruncated {
        mass: f64,
        width: f64,
        threshold: f64,
    },
    Gaussian {
        mass: f64,
        sigma: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PacketFile {
    sigma_p: f64,
    #[serde(default = "default_shape")]
    shape: String,
    #[serde(default = "default_dimension")]
    dimension: usize,
}

fn default_shape() -> String {
    "gaussian".into()
}

fn default_dimension() -> usize {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    t_start: f64,
    t_stop: f64,
    n_points: usize,
    #[serde(default = "default_spacing")]
    spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Uniform
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    #[serde(default)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_evaluations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    force_numeric: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketSpec {
    pub packet: MomentumPacket,
    pub dimension: usize,
}

/// Tail tolerance of the `oracle` treatment. Certified windows for heavy
/// tails grow as `tail_tol^{-1/2}`, so the library default is too slow here.
const SCENARIO_ORACLE: OracleConfig = OracleConfig { tail_tol: 1e-10 };

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub unit_note: Option<String>,
    pub treatments: Vec<Treatment>,
    pub dist: MassDistribution,
    pub packet: Option<PacketSpec>,
    pub boost: Boost,
    pub grid: TimeGrid,
    pub output_path: String,
    pub output_format: OutputFormat,
    pub quad: QuadOptions,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&src)
    }

    /// Parses and validates. Diagnostics carry the line and the field.
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(src)
            .map_err(|e| Error::Scenario(e.to_string().trim_end().to_owned()))?;
        file.validate().map_err(|e| match e {
            Error::InvalidParameter { field, reason } => {
                let at = locate(src, field)
                    .map(|l| format!("line {l}, "))
                    .unwrap_or_default();
                Error::Scenario(format!("{at}field `{field}`: {reason}"))
            }
            other => Error::Scenario(other.to_string()),
        })
    }

    /// Canonical TOML with every default filled in.
    pub fn to_normalized_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("scenario serializes")
    }

    /// SHA-256 of the normalized form, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_normalized_toml().as_bytes()))
    }

    /// Regime report when a packet is present.
    pub fn regime(&self) -> Option<RegimeReport> {
        let spec = self.packet.as_ref()?;
        check_regime(
            self.dist.mass,
            self.dist.width,
            spec.packet.sigma_p,
            self.boost.v,
        )
        .ok()
    }

    pub fn wavepacket(&self) -> Option<Result<WavepacketScenario>> {
        let spec = self.packet.as_ref()?;
        Some(WavepacketScenario::new(
            self.dist,
            spec.packet,
            self.boost,
            spec.dimension,
        ))
    }

    /// Scenario quadrature settings, with the tolerance override from the
    /// environment applied on top.
    pub fn effective_options(&self) -> Result<QuadOptions> {
        let env = QuadOptions::from_env()?;
        let mut opts = self.quad;
        if std::env::var_os(crate::quadrature::TOLERANCE_ENV).is_some() {
            opts.abs_tol = env.abs_tol;
        }
        Ok(opts)
    }

    /// Runs every selected treatment in file order. Failures are wrapped in
    /// [`Error::InTreatment`].
    pub fn evaluate(&self, opts: &QuadOptions) -> Result<Vec<SurvivalCurve>> {
        let wavepacket = self.wavepacket().transpose()?;
        self.treatments
            .iter()
            .map(|&treatment| {
                let curve = match treatment {
                    Treatment::Rest => amplitude::survival_rest_with(&self.dist, &self.grid, opts),
                    Treatment::NaiveBoost => amplitude::survival_naive_boost_with(
                        &self.dist,
                        &self.boost,
                        &self.grid,
                        opts,
                    ),
                    Treatment::HeuristicSpacetime => amplitude::survival_heuristic_with(
                        &self.dist,
                        &self.boost,
                        &self.grid,
                        opts,
                    ),
                    Treatment::WavepacketExact => wavepacket::survival_wavepacket_exact_with(
                        wavepacket.as_ref().expect("validated"),
                        &self.grid,
                        opts,
                    ),
                    Treatment::WavepacketApprox => wavepacket::survival_wavepacket_approx_with(
                        wavepacket.as_ref().expect("validated"),
                        &self.grid,
                        opts,
                    ),
                    Treatment::RestOracle => {
                        amplitude::survival_rest_oracle(&self.dist, &self.grid, &SCENARIO_ORACLE)
                    }
                };
                curve.map_err(|source| Error::InTreatment {
                    treatment: treatment.key(),
                    source: Box::new(source),
                })
            })
            .collect()
    }

    fn to_file(&self) -> ScenarioFile {
        let distribution = match self.dist.family {
            Family::BreitWignerFullLine => DistributionFile::BreitWigner {
                mass: self.dist.mass,
                width: self.dist.width,
            },
            Family::BreitWignerTruncated { threshold } => DistributionFile::BreitWignerTruncated {
                mass: self.dist.mass,
                width: self.dist.width,
                threshold,
            },
            Family::Gaussian { sigma } => DistributionFile::Gaussian {
                mass: self.dist.mass,
                sigma,
            },
        };
        ScenarioFile {
            name: self.name.clone(),
            unit_note: self.unit_note.clone(),
            treatments: self.treatments.iter().map(|t| t.key().to_owned()).collect(),
            v: self.boost.v,
            distribution,
            packet: self.packet.as_ref().map(|p| PacketFile {
                sigma_p: p.packet.sigma_p,
                shape: "gaussian".into(),
                dimension: p.dimension,
            }),
            grid: GridFile {
                t_start: self.grid.t_start,
                t_stop: self.grid.t_stop,
                n_points: self.grid.n_points,
                spacing: self.grid.spacing,
            },
            output: OutputFile {
                path: Some(self.output_path.clone()),
                format: self.output_format,
            },
            quadrature: QuadratureFile {
                abs_tol: Some(self.quad.abs_tol),
                rel_tol: Some(self.quad.rel_tol),
                max_evaluations: Some(self.quad.max_evaluations),
                force_numeric: Some(self.quad.force_numeric),
            },
        }
    }
}

impl ScenarioFile {
    fn validate(self) -> Result<Scenario> {
        use crate::error::invalid;

        if self.name.trim().is_empty() {
            return Err(invalid("name", "must not be empty"));
        }
        if self.treatments.is_empty() {
            return Err(invalid("treatments", "no treatments selected"));
        }
        let mut treatments = Vec::with_capacity(self.treatments.len());
        for key in &self.treatments {
            let t = Treatment::from_key(key).ok_or_else(|| {
                let known: Vec<_> = Treatment::ALL.iter().map(|t| t.key()).collect();
                invalid(
                    "treatments",
                    format!(
                        "unknown treatment {key:?}, expected one of {}",
                        known.join(", ")
                    ),
                )
            })?;
            if treatments.contains(&t) {
                return Err(invalid(
                    "treatments",
                    format!("treatment {key:?} listed twice"),
                ));
            }
            treatments.push(t);
        }

        let dist = match self.distribution {
            DistributionFile::BreitWigner { mass, width } => {
                MassDistribution::breit_wigner(mass, width)
            }
            DistributionFile::BreitWignerTruncated {
                mass,
                width,
                threshold,
            } => MassDistribution::breit_wigner_truncated(mass, width, threshold),
            DistributionFile::Gaussian { mass, sigma } => MassDistribution::gaussian(mass, sigma),
        }?;
        let boost = Boost::new(self.v)?;

        let packet = match self.packet {
            Some(p) => {
                if p.shape != "gaussian" {
                    return Err(invalid(
                        "shape",
                        format!("unsupported packet shape {:?}", p.shape),
                    ));
                }
                if !(p.dimension == 1 || p.dimension == 3) {
                    return Err(invalid(
                        "dimension",
                        format!("must be 1 or 3, got {}", p.dimension),
                    ));
                }
                let packet = MomentumPacket::gaussian(p.sigma_p)?;
                Some(PacketSpec {
                    packet,
                    dimension: p.dimension,
                })
            }
            None => None,
        };
        let wants_packet = treatments.iter().any(Treatment::needs_packet);
        match (wants_packet, packet.is_some()) {
            (true, false) => {
                return Err(invalid(
                    "packet",
                    "wave-packet treatments need a [packet] table",
                ))
            }
            (false, true) => {
                return Err(invalid(
                    "packet",
                    "[packet] given but no wave-packet treatment selected",
                ))
            }
            _ => {}
        }

        let grid = TimeGrid::new(
            self.grid.t_start,
            self.grid.t_stop,
            self.grid.n_points,
            self.grid.spacing,
        )?;

        let quad = QuadOptions {
            abs_tol: self.quadrature.abs_tol.unwrap_or(DEFAULT_ABS_TOL),
            rel_tol: self.quadrature.rel_tol.unwrap_or(0.0),
            max_evaluations: self
                .quadrature
                .max_evaluations
                .unwrap_or(DEFAULT_MAX_EVALUATIONS),
            force_numeric: self.quadrature.force_numeric.unwrap_or(false),
        };
        if !(quad.abs_tol.is_finite() && quad.abs_tol > 0.0) {
            return Err(invalid(
                "abs_tol",
                format!("must be finite and > 0, got {}", quad.abs_tol),
            ));
        }
        if !(quad.rel_tol.is_finite() && quad.rel_tol >= 0.0) {
            return Err(invalid(
                "rel_tol",
                format!("must be finite and >= 0, got {}", quad.rel_tol),
            ));
        }
        if quad.max_evaluations < 100 {
            return Err(invalid(
                "max_evaluations",
                format!("must be >= 100, got {}", quad.max_evaluations),
            ));
        }

        let output_format = self.output.format;
        let output_path = match self.output.path {
            Some(p) if p.trim().is_empty() => return Err(invalid("path", "must not be empty")),
            Some(p) => p,
            None => format!("{}.{}", self.name, output_format.extension()),
        };

        Ok(Scenario {
            name: self.name,
            unit_note: self.unit_note,
            treatments,
            dist,
            packet,
            boost,
            grid,
            output_path,
            output_format,
            quad,
        })
    }
}

/// 1-based line of the first `field = ...` assignment.
fn locate(src: &str, field: &str) -> Option<usize> {
    src.lines()
        .position(|line| {
            let line = line.trim_start();
            line.strip_prefix(field)
                .map(|rest| rest.trim_start().starts_with('='))
                .unwrap_or(false)
        })
        .map(|i| i + 1)
}
