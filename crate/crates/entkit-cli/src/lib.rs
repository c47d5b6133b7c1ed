//! `entkit`: command-line access to the bipartite entanglement toolkit.
//!
//! Every run executes one subcommand and prints one JSON document to stdout
//! with the inputs echoed, the results at full precision, and a pass/fail
//! record per verified identity. Exit codes: 0 when every check passes, 1
//! when a verification fails, 2 on input errors and violated preconditions.
//!
//! The environment variable `ENTKIT_TOLERANCE_SCALE` (default 1) multiplies
//! every comparison tolerance, for diagnostic use. It never loosens the
//! validation of input files.

mod cmds;
mod error;
mod files;
mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};
use crate::render::Document;

#[derive(Parser)]
#[command(
    name = "entkit",
    version,
    about = "Entanglement structure of bipartite pure states: Schmidt data, correlation \
             operator, decompositions, twin observables, diagrams, preparation, simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schmidt coefficients and the biorthogonal subsystem bases of a state.
    Schmidt {
        /// State file.
        state: PathBuf,
    },
    /// The antiunitary correlation operator and its defining identities.
    CorrelationOp {
        /// State file.
        state: PathBuf,
    },
    /// Reduced density operators of both subsystems and their common spectrum.
    Reduce {
        /// State file.
        state: PathBuf,
    },
    /// Map an orthonormal range basis to its linearly independent decomposition.
    Cvl {
        /// State file.
        state: PathBuf,
        /// Basis file: one vector per range dimension of the reduced state.
        #[arg(long)]
        basis: PathBuf,
        /// Subsystem carrying the reduced state: 1 nearby, 2 remote.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        subsystem: u8,
    },
    /// Map a linearly independent decomposition back to its range basis.
    CvlInverse {
        /// State file.
        state: PathBuf,
        /// Decomposition file for the chosen reduced state.
        #[arg(long)]
        decomp: PathBuf,
        /// Subsystem carrying the reduced state: 1 nearby, 2 remote.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        subsystem: u8,
    },
    /// Characteristic weight of a unit vector in a reduced density operator.
    CharWeight {
        /// State file.
        state: PathBuf,
        /// Vector file with the unit vector to weigh.
        #[arg(long)]
        target: PathBuf,
        /// Subsystem carrying the reduced state: 1 nearby, 2 remote.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        subsystem: u8,
    },
    /// Expansion coefficients of a vector over decomposition vectors.
    Expand {
        /// Decomposition file providing the linearly independent vectors.
        #[arg(long)]
        decomp: PathBuf,
        /// Vector file with the vector to expand.
        #[arg(long)]
        vector: PathBuf,
    },
    /// Twin partner of an observable under the state's correlation operator.
    Twin {
        /// State file.
        state: PathBuf,
        /// Observable file; its subsystem field picks the side.
        #[arg(long)]
        observable: PathBuf,
        /// Replacement eigenvalues for the partner's detectable part,
        /// comma-separated, one per detectable eigenvalue.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        spectrum: Option<Vec<f64>>,
    },
    /// Classify two observables as proper twins, extended twins, or neither.
    ClassifyPair {
        /// State file.
        state: PathBuf,
        /// Observable file for one subsystem.
        #[arg(long)]
        first: PathBuf,
        /// Observable file for the other subsystem.
        #[arg(long)]
        second: PathBuf,
    },
    /// Verify the four-corner decomposition diagram on one state or a batch.
    DiagramCheck {
        /// State file; omit it to use --random instead.
        state: Option<PathBuf>,
        /// Probe basis file; defaults to a Fourier mix of the range basis.
        #[arg(long)]
        basis: Option<PathBuf>,
        /// Verify this many randomly drawn states.
        #[arg(long, value_name = "N")]
        random: Option<u32>,
        /// Dimensions of the random states.
        #[arg(long, num_args = 2, value_names = ["D1", "D2"])]
        dims: Option<Vec<usize>>,
        /// Seed of the first random state; instance k uses seed + k.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Plan the remote preparation of a target vector with maximal probability.
    Prepare {
        /// State file.
        state: PathBuf,
        /// Vector file with the remote target.
        #[arg(long)]
        target: PathBuf,
    },
    /// Simulate the measurement chain and sample outcome statistics.
    Simulate {
        /// State file.
        state: PathBuf,
        /// Nearby measurement basis file: a full orthonormal basis, or one of
        /// the range of the nearby reduced state.
        #[arg(long)]
        basis: PathBuf,
        /// Number of Monte Carlo shots.
        #[arg(long)]
        shots: u64,
        /// Seed; shot k draws from an independent stream of this seed.
        #[arg(long)]
        seed: u64,
        /// Basis file with post-measurement nearby vectors, one per basis
        /// vector; turns the run into a measurement of the second kind.
        #[arg(long)]
        second_kind: Option<PathBuf>,
        /// Draw shots concurrently; counts are identical either way.
        #[arg(long)]
        parallel_shots: bool,
    },
}

fn tolerance_scale() -> CliResult<f64> {
    match std::env::var("ENTKIT_TOLERANCE_SCALE") {
        Err(std::env::VarError::NotPresent) => Ok(1.0),
        Err(std::env::VarError::NotUnicode(_)) => Err(CliError::Env("not unicode".into())),
        Ok(text) => match text.trim().parse::<f64>() {
            Ok(scale) if scale.is_finite() && scale > 0.0 => Ok(scale),
            _ => Err(CliError::Env(format!("'{text}' is not a positive finite number"))),
        },
    }
}

fn dispatch(command: Command, scale: f64) -> CliResult<Document> {
    match command {
        Command::Schmidt { state } => cmds::spectral::schmidt(&state, scale),
        Command::CorrelationOp { state } => cmds::spectral::correlation_op(&state, scale),
        Command::Reduce { state } => cmds::spectral::reduce(&state, scale),
        Command::Cvl { state, basis, subsystem } => {
            cmds::decomp::cvl(&state, &basis, subsystem, scale)
        }
        Command::CvlInverse { state, decomp, subsystem } => {
            cmds::decomp::cvl_inverse(&state, &decomp, subsystem, scale)
        }
        Command::CharWeight { state, target, subsystem } => {
            cmds::decomp::char_weight(&state, &target, subsystem, scale)
        }
        Command::Expand { decomp, vector } => cmds::decomp::expand(&decomp, &vector, scale),
        Command::Twin { state, observable, spectrum } => {
            cmds::twins::twin(&state, &observable, spectrum.as_deref(), scale)
        }
        Command::ClassifyPair { state, first, second } => {
            cmds::twins::classify_pair(&state, &first, &second, scale)
        }
        Command::DiagramCheck { state, basis, random, dims, seed } => {
            cmds::diagram::diagram_check(
                state.as_deref(),
                basis.as_deref(),
                random,
                dims.as_deref(),
                seed,
                scale,
            )
        }
        Command::Prepare { state, target } => cmds::prepare::prepare(&state, &target, scale),
        Command::Simulate { state, basis, shots, seed, second_kind, parallel_shots } => {
            cmds::simulate::simulate(
                &state,
                &basis,
                shots,
                seed,
                second_kind.as_deref(),
                parallel_shots,
                scale,
            )
        }
    }
}

/// Parses `args`, runs the subcommand, and writes the document to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(parse_err) => {
            let rendered = parse_err.render();
            return match parse_err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    2
                }
            };
        }
    };
    let document = tolerance_scale().and_then(|scale| dispatch(cli.command, scale));
    match document {
        Ok(document) => {
            let _ = out.write_all(document.render().as_bytes());
            if document.pass() {
                0
            } else {
                1
            }
        }
        Err(cli_err) => {
            let _ = writeln!(err, "{cli_err}");
            2
        }
    }
}
