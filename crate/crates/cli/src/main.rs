//! `wpsys` — exact Weil-Petersson volumes, short-geodesic integrals,
//! systole estimates, separating-curve bounds, and a seeded spectrum
//! simulator, all behind reproducible commands.
//!
//! Every run is recorded in a manifest (a JSON file with `--manifest PATH`,
//! otherwise a single line on stderr) holding the resolved parameters, the
//! constants in effect, and a digest of the stdout bytes; `wpsys replay`
//! re-executes a manifest and verifies the digest.
//!
//! Exit codes: 0 success, 1 replay digest mismatch, 2 usage or domain
//! error, 3 tolerance not met, 4 I/O failure.

mod exec;
mod manifest;
mod request;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use wpsys_core::estimator::BoundConstants;
use wpsys_core::Error as CoreError;

use manifest::RunManifest;
use request::{parse_genus, Action, Format, IntegralOp, Request};

#[derive(Parser)]
#[command(name = "wpsys", version, about = "Short-geodesic statistics of Weil-Petersson random surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit machine-readable JSON instead of plain text
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,

    /// Emit the command's primary table as CSV
    #[arg(long, global = true)]
    csv: bool,

    /// Write the run manifest to this path (default: one line on stderr)
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,

    /// Flat JSON file overriding bound constants (absent fields default)
    #[arg(long, global = true, value_name = "FILE")]
    constants: Option<PathBuf>,

    /// Volume table JSON file (overrides WPSYS_TABLE and the builtin table)
    #[arg(long, global = true, value_name = "FILE")]
    table: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a volume polynomial exactly and evaluate it at boundary lengths
    Volume {
        /// Genus (scientific notation accepted)
        #[arg(long = "g", value_parser = parse_genus)]
        genus: u64,
        /// Number of boundary components
        #[arg(long = "n")]
        boundaries: u32,
        /// Comma-separated boundary lengths to evaluate at
        #[arg(long = "at", value_delimiter = ',', num_args = 1..)]
        at: Option<Vec<f64>>,
    },
    /// Geodesic-count and growth integrals
    Integrals {
        #[command(subcommand)]
        operation: IntegralsCommand,
    },
    /// Probability that a genus-g surface has a geodesic shorter than L
    Estimate {
        /// Genus (scientific notation accepted)
        #[arg(long = "g", value_parser = parse_genus)]
        genus: u64,
        /// Length window L
        #[arg(long = "L", conflicts_with = "l_from_l0")]
        window: Option<f64>,
        /// Use the critical scale L0(g) as the window
        #[arg(long = "L-from-L0")]
        l_from_l0: bool,
        /// Even truncation order (default 2 ceil(ln g))
        #[arg(long = "n-terms")]
        n_terms: Option<u32>,
        /// Long-window margin for the regime classifier
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Short-window margin for the regime classifier
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
    },
    /// Separating-multicurve volume bound with per-complexity cases
    Bound {
        /// Genus (scientific notation accepted)
        #[arg(long = "g", value_parser = parse_genus)]
        genus: u64,
        /// Number of boundary components
        #[arg(long = "n")]
        boundaries: u64,
        /// Length window L
        #[arg(long = "L")]
        window: f64,
    },
    /// Seeded Poisson simulation of the limiting length spectrum
    Simulate {
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Length window L
        #[arg(long = "L")]
        window: f64,
        /// Comma-separated evaluation points for the systole distribution
        /// (default: quarter points of the window)
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        points: Option<Vec<f64>>,
        /// Cells in the inversion grid
        #[arg(long, default_value_t = 4096)]
        grid: u32,
    },
    /// Re-execute a recorded manifest and verify the output digest
    Replay {
        /// Manifest file produced by an earlier run
        #[arg(long, value_name = "PATH")]
        manifest: PathBuf,
    },
}

#[derive(Subcommand)]
enum IntegralsCommand {
    /// Expected count of primitive geodesics shorter than L
    #[command(name = "I")]
    I {
        #[arg(long = "L")]
        length: f64,
    },
    /// Growth integral T(L)
    #[command(name = "T")]
    T {
        #[arg(long = "L")]
        length: f64,
    },
    /// Inverse growth T^-1(y)
    #[command(name = "Tinv")]
    Tinv {
        #[arg(long = "y")]
        target: f64,
    },
    /// Critical length scale L0(g) = T^-1(ln(g)/2)
    #[command(name = "L0")]
    L0 {
        /// Genus (scientific notation accepted)
        #[arg(long = "g", value_parser = parse_genus)]
        genus: u64,
    },
    /// The constant C = I(1)
    #[command(name = "C")]
    C,
}

/// An error carrying its process exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(err: CoreError) -> Self {
        let code = match err {
            CoreError::UnknownType { .. }
            | CoreError::ArityMismatch { .. }
            | CoreError::EmptyRange { .. }
            | CoreError::BinomialOverflow { .. }
            | CoreError::InvalidParameter(_) => 2,
            CoreError::ToleranceNotMet { .. } => 3,
            CoreError::TableIo { .. } | CoreError::InvalidTable(_) => 4,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match dispatch(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    });
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    if let Command::Replay { manifest } = &cli.command {
        return replay(manifest);
    }

    let constants = load_constants(cli.constants.as_deref())?;
    let request = build_request(&cli)?;
    let output = exec::execute(&request, &constants)?;
    print!("{output}");

    let record = RunManifest::record(&request, &constants, &output);
    match &cli.manifest {
        Some(path) => {
            std::fs::write(path, record.to_json())
                .map_err(|err| Failure::io(format!("writing manifest {}: {err}", path.display())))?;
            eprintln!("manifest written to {}", path.display());
        }
        None => eprintln!("{}", record.to_json_compact()),
    }
    Ok(0)
}

fn replay(path: &Path) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| Failure::io(format!("reading manifest {}: {err}", path.display())))?;
    let record: RunManifest = serde_json::from_str(&text)
        .map_err(|err| Failure::io(format!("parsing manifest {}: {err}", path.display())))?;
    let request = record
        .request()
        .map_err(|err| Failure::io(format!("manifest parameters do not parse: {err}")))?;

    let output = exec::execute(&request, &record.constants)?;
    print!("{output}");

    let fresh = manifest::digest(&output);
    if fresh == record.outputs_digest {
        eprintln!("replay verified ({fresh})");
        Ok(0)
    } else {
        eprintln!(
            "replay mismatch: manifest records {}, reproduced {fresh}",
            record.outputs_digest
        );
        Ok(1)
    }
}

fn load_constants(path: Option<&Path>) -> Result<BoundConstants, Failure> {
    let Some(path) = path else {
        return Ok(BoundConstants::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|err| Failure::io(format!("reading constants {}: {err}", path.display())))?;
    let constants: BoundConstants = serde_json::from_str(&text)
        .map_err(|err| Failure::io(format!("parsing constants {}: {err}", path.display())))?;
    constants.validate()?;
    Ok(constants)
}

fn build_request(cli: &Cli) -> Result<Request, Failure> {
    let format = match (cli.json, cli.csv) {
        (true, _) => Format::Json,
        (_, true) => Format::Csv,
        _ => Format::Plain,
    };
    let table = match &cli.table {
        Some(path) => Some(path.display().to_string()),
        None => std::env::var("WPSYS_TABLE").ok().filter(|s| !s.is_empty()),
    };

    let action = match &cli.command {
        Command::Volume {
            genus,
            boundaries,
            at,
        } => Action::Volume {
            genus: u32::try_from(*genus)
                .map_err(|_| Failure::usage(format!("genus {genus} is out of table range")))?,
            boundaries: *boundaries,
            lengths: at.clone(),
        },
        Command::Integrals { operation } => Action::Integrals {
            operation: match *operation {
                IntegralsCommand::I { length } => IntegralOp::I { length },
                IntegralsCommand::T { length } => IntegralOp::T { length },
                IntegralsCommand::Tinv { target } => IntegralOp::TInverse { target },
                IntegralsCommand::L0 { genus } => IntegralOp::L0 { genus },
                IntegralsCommand::C => IntegralOp::C,
            },
        },
        Command::Estimate {
            genus,
            window,
            l_from_l0,
            n_terms,
            eps,
            delta,
        } => {
            if window.is_none() && !l_from_l0 {
                return Err(Failure::usage(
                    "estimate needs a window: pass --L <length> or --L-from-L0",
                ));
            }
            let n_terms = match n_terms {
                Some(n) => {
                    if *n == 0 || *n % 2 != 0 {
                        return Err(Failure::usage(format!(
                            "n_terms must be even and positive, got {n}"
                        )));
                    }
                    *n
                }
                None => 2 * ((*genus as f64).ln().ceil().max(1.0) as u32),
            };
            Action::Estimate {
                genus: *genus,
                window: *window,
                window_from_l0: *l_from_l0,
                n_terms,
                eps: *eps,
                delta: *delta,
            }
        }
        Command::Bound {
            genus,
            boundaries,
            window,
        } => Action::Bound {
            genus: *genus,
            boundaries: *boundaries,
            window: *window,
        },
        Command::Simulate {
            trials,
            seed,
            window,
            points,
            grid,
        } => Action::Simulate {
            trials: *trials,
            seed: *seed,
            window: *window,
            points: points
                .clone()
                .unwrap_or_else(|| (1..=4).map(|i| window * i as f64 / 4.0).collect()),
            inversion_grid: *grid,
        },
        Command::Replay { .. } => unreachable!("replay is handled before request building"),
    };

    Ok(Request {
        action,
        format,
        table,
    })
}
