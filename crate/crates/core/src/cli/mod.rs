//! Batch command-line front end: `spectrum`, `design` and `convert`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 no control-field geometry can compensate the Doppler shift.

mod commands;
mod output;
mod scenario;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    cmd_convert, cmd_design, cmd_spectrum, default_probe_detuning, ConversionSummary, MetricsOutcome, RunOptions,
    SpectrumSummary, DEFAULT_N_Z, DEFAULT_POINTS, DEFAULT_SPAN_MHZ, DEFAULT_Z_MAX,
};
pub use output::{create_with_header, write_csv, write_json};
pub use scenario::{fields_preset, parse_frequency, scheme_preset, Scenario};

use crate::doppler::QuadratureKind;
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "dffwm", version, about = "Doppler-free dressed four-wave mixing in a Raman scheme")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-velocity response surface and velocity-averaged spectra.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Full probe scan width, e.g. `2GHz` or `300` (MHz).
        #[arg(long, value_parser = frequency)]
        omega1_span: Option<f64>,
        /// Number of probe detunings.
        #[arg(long)]
        points: Option<usize>,
        /// Switch the control field E3− off.
        #[arg(long)]
        no_control: bool,
    },
    /// Solve for the control Rabi frequency that removes the two-photon Doppler shift.
    Design {
        #[command(flatten)]
        common: Common,
        /// Let E3− co-propagate with the probe.
        #[arg(long)]
        co_propagating_control: bool,
    },
    /// Quantum conversion efficiency versus optical thickness.
    Convert {
        #[command(flatten)]
        common: Common,
        /// Largest optical thickness α01·z.
        #[arg(long)]
        zmax: Option<f64>,
        /// Number of thickness samples.
        #[arg(long)]
        nz: Option<usize>,
        /// Also run with E3− off and report the enhancement.
        #[arg(long)]
        compare_off: bool,
        /// Switch the control field E3− off.
        #[arg(long)]
        no_control: bool,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Built-in field configuration (`fig1b`, `fig1c`).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Scenario file (TOML or JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fixed probe detuning, e.g. `100.1GHz`; chosen automatically when absent.
    #[arg(long, value_parser = frequency, allow_hyphen_values = true)]
    omega1: Option<f64>,
    /// Velocity quadrature.
    #[arg(long, value_enum)]
    quadrature: Option<QuadratureArg>,
    /// Number of velocity nodes.
    #[arg(long)]
    velocity_nodes: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QuadratureArg {
    Gh,
    Trap,
}

fn frequency(s: &str) -> std::result::Result<f64, String> {
    parse_frequency(s)
}

impl Common {
    fn scenario(&self) -> Result<Scenario> {
        let mut s = match (&self.preset, &self.config) {
            (_, Some(path)) => Scenario::from_file(path)?,
            (Some(name), None) => Scenario::preset(name)?,
            (None, None) => return Err(Error::Config("either --preset or --config is required".into())),
        };
        if self.omega1.is_some() {
            s.omega1 = self.omega1;
        }
        if let Some(q) = self.quadrature {
            s.quadrature = Some(match q {
                QuadratureArg::Gh => QuadratureKind::GaussHermite,
                QuadratureArg::Trap => QuadratureKind::AdaptiveTrapezoid,
            });
        }
        if self.velocity_nodes.is_some() {
            s.velocity_nodes = self.velocity_nodes;
        }
        Ok(s)
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            out_dir: self.out.clone(),
            ..RunOptions::default()
        }
    }
}

fn execute(command: Command) -> Result<String> {
    let json = match command {
        Command::Spectrum {
            common,
            omega1_span,
            points,
            no_control,
        } => {
            let mut s = common.scenario()?;
            s.omega1_span = omega1_span.or(s.omega1_span);
            s.points = points.or(s.points);
            let options = RunOptions {
                no_control,
                ..common.options()
            };
            serde_json::to_string_pretty(&cmd_spectrum(&s, &options)?)?
        }
        Command::Design {
            common,
            co_propagating_control,
        } => {
            let s = common.scenario()?;
            let options = RunOptions {
                co_propagating_control,
                ..common.options()
            };
            serde_json::to_string_pretty(&cmd_design(&s, &options)?)?
        }
        Command::Convert {
            common,
            zmax,
            nz,
            compare_off,
            no_control,
        } => {
            let mut s = common.scenario()?;
            s.z_max = zmax.or(s.z_max);
            s.n_z = nz.or(s.n_z);
            let options = RunOptions {
                no_control,
                compare_off,
                ..common.options()
            };
            serde_json::to_string_pretty(&cmd_convert(&s, &options)?)?
        }
    };
    Ok(json)
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(json) => {
            println!("{json}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point of the `dffwm` binary.
pub fn main() -> i32 {
    run(std::env::args_os())
}
