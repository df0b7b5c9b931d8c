//! `decay run | compare | regime`.
//!
//! Exit codes: 0 on success, 2 on parse or validation errors, 3 when a
//! quadrature fails to converge, 1 on I/O failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use decay_core::report::{self, RunMetadata, TOOL_VERSION};
use decay_core::scenario::{OutputFormat, Scenario};
use decay_core::{regimes, Error, Treatment};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "decay",
    version,
    about = "Survival probability of unstable systems at rest and in motion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every treatment of a scenario and write the output table.
    Run {
        file: PathBuf,
        /// Directory for the output file; defaults to the current directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Echo the normalized scenario to stdout before running.
        #[arg(long)]
        print_normalized: bool,
    },
    /// Gap statistics between two treatments of a scenario.
    Compare {
        file: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Measurability report for mass M, width Γ, packet spread σ_p and speed v.
    Regime {
        #[arg(long = "M", value_name = "M")]
        mass: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        sigma_p: f64,
        #[arg(long)]
        v: f64,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::QuadratureNonConvergence { .. } => EXIT_NONCONVERGENCE,
            Error::InTreatment { source, .. }
                if matches!(**source, Error::QuadratureNonConvergence { .. }) =>
            {
                EXIT_NONCONVERGENCE
            }
            Error::InTreatment { .. } => EXIT_IO,
            Error::GridTooSmall { .. } => EXIT_IO,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_IO,
        message: e.to_string(),
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(
    command: Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    match command {
        Command::Run {
            file,
            out,
            print_normalized,
        } => {
            let scenario = Scenario::load(&file)?;
            if print_normalized {
                write!(stdout, "{}", scenario.to_normalized_toml()).map_err(io_failure)?;
            }
            let opts = scenario.effective_options()?;
            let curves = scenario.evaluate(&opts)?;
            let meta = RunMetadata {
                tool_version: TOOL_VERSION.to_owned(),
                scenario_name: scenario.name.clone(),
                scenario_sha256: scenario.hash(),
                unit_note: scenario.unit_note.clone(),
                abs_tol: opts.abs_tol,
                regime: scenario.regime(),
            };
            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir).map_err(io_failure)?;
            let path = dir.join(&scenario.output_path);
            let mut w = BufWriter::new(
                File::create(&path).map_err(|e| io_failure(format!("{}: {e}", path.display())))?,
            );
            match scenario.output_format {
                OutputFormat::Csv => report::write_csv(&mut w, &meta, &curves)?,
                OutputFormat::Json => report::write_json(&mut w, &meta, &curves)?,
            }
            w.flush().map_err(io_failure)?;
            writeln!(stderr, "wrote {}", path.display()).map_err(io_failure)?;
            Ok(())
        }
        Command::Compare { file, a, b } => {
            let mut scenario = Scenario::load(&file)?;
            let pick = |key: &str| -> Result<Treatment, Failure> {
                Treatment::from_key(key)
                    .filter(|t| scenario.treatments.contains(t))
                    .ok_or_else(|| Failure {
                        code: EXIT_INVALID,
                        message: format!(
                            "treatment {key:?} is not part of scenario {:?}",
                            scenario.name
                        ),
                    })
            };
            let (ta, tb) = (pick(&a)?, pick(&b)?);
            scenario.treatments = if ta == tb { vec![ta] } else { vec![ta, tb] };
            let opts = scenario.effective_options()?;
            let curves = scenario.evaluate(&opts)?;
            let (ca, cb) = (&curves[0], curves.last().expect("at least one curve"));
            let summary = report::compare_curves(ca, cb, scenario.regime().as_ref())?;
            serde_json::to_writer_pretty(&mut *stdout, &summary).map_err(io_failure)?;
            writeln!(stdout).map_err(io_failure)?;
            Ok(())
        }
        Command::Regime {
            mass,
            gamma,
            sigma_p,
            v,
        } => {
            let report = regimes::check_regime(mass, gamma, sigma_p, v)?;
            serde_json::to_writer_pretty(&mut *stdout, &report).map_err(io_failure)?;
            writeln!(stdout).map_err(io_failure)?;
            Ok(())
        }
    }
}
