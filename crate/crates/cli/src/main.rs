//! `slicecalc`: spectra, functional calculi, projectors and the identity
//! battery for commuting paravector operator tuples.
//!
//! Exit codes: 0 success, 1 usage/parse/IO error, 2 non-commuting tuple,
//! 3 contour or spectral failure, 4 verification failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use slicecalc::Error;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NON_COMMUTING: u8 = 2;
pub const EXIT_CONTOUR: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "slicecalc", version, about = "Functional calculus for commuting paravector operators")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraArg {
    Clifford,
    Quaternion,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CalculusArg {
    Sc,
    F,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    Left,
    Right,
}

/// Settings shared by every subcommand; echoed into each report.
#[derive(Args, Debug, Clone, Serialize)]
pub struct RunArgs {
    /// Operator tuple file (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Number of imaginary units; checked against the input, or restricts
    /// the Clifford cases of `verify`.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub algebra: Option<AlgebraArg>,
    /// Trapezoidal nodes per circle.
    #[arg(long, global = true, default_value_t = 256)]
    pub nodes: usize,
    /// Distance kept between contours and spectral spheres.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub margin: f64,
    /// Resolvent evaluations with a larger 1-norm condition estimate fail.
    #[arg(long, global = true, default_value_t = 1e12)]
    pub cond_threshold: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Components of the imaginary unit spanning the integration plane,
    /// comma separated; defaults to e1.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub plane: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    pub output: Output,
    /// Include wall-clock times (makes reports non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// F-spectrum as spheres (s0, r) with multiplicities.
    Spectrum {
        /// Cross-check against a singular-value scan of the pencil.
        #[arg(long)]
        oracle: bool,
        /// Scan points per side of the oracle grid.
        #[arg(long, default_value_t = 161)]
        oracle_grid: usize,
    },
    /// Apply the SC- or F-functional calculus to a function.
    Apply {
        #[arg(long, value_enum)]
        calculus: CalculusArg,
        /// Function, e.g. "poly left [0;0;1]" or "rational [1] / [4;0;1]".
        #[arg(long = "f")]
        function: String,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        /// Compare results over two contours and three planes.
        #[arg(long)]
        check_independence: bool,
    },
    /// Projectors onto separated parts of the F-spectrum.
    Project {
        /// Sphere indices (as listed by `spectrum`), comma separated, or
        /// `all`. Without it every separated group gets a projector.
        #[arg(long)]
        subset: Option<String>,
    },
    /// Run the identity battery.
    Verify {
        /// Run a single catalog entry.
        #[arg(long)]
        only: Option<String>,
        /// Largest m and j in the exact binomial check.
        #[arg(long, default_value_t = 12)]
        m_max: i64,
        /// Random points per pointwise identity.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// List the catalog and exit.
        #[arg(long)]
        list: bool,
    },
}

/// Failure of a subcommand, with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonCommuting { .. } => EXIT_NON_COMMUTING,
            Error::Contour(_) | Error::SpectralPoint { .. } | Error::Singular(_) | Error::Pole(_) => EXIT_CONTOUR,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
