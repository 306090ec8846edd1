//! `unsharp`: measure, transform, simulate and scan POVMs from the shell.
//!
//! Every command is a thin adapter over `unsharp_core`: files in, the
//! library's JSON/CSV formats out. Exit codes are stable: 0 success,
//! 1 domain violation (invalid POVM/state or parameter), 2 usage, parse or
//! I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use unsharp_core::instruments::{
    estimate_qubit_e_matrix, estimate_qubit_x_matrix, simulate, InstrumentKind,
};
use unsharp_core::measures::measure_report;
use unsharp_core::monotonicity::{
    dichotomic_grid_scan, lambda_sweep, write_grid_csv, write_sweep_csv,
};
use unsharp_core::search::conjecture_scan;
use unsharp_core::{DensityMatrix, Povm};

#[derive(Parser)]
#[command(
    name = "unsharp",
    version,
    about = "Unsharpness measures of quantum observables (POVMs)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Luder,
    Jmax,
}

impl From<Kind> for InstrumentKind {
    fn from(kind: Kind) -> Self {
        match kind {
            Kind::Luder => InstrumentKind::Luder,
            Kind::Jmax => InstrumentKind::JMax,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a POVM file against the validity invariants.
    Validate {
        /// POVM JSON file.
        #[arg(long)]
        input: PathBuf,
    },
    /// Compute all unsharpness measures of a POVM.
    Measures {
        #[arg(long)]
        input: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Mix a POVM with white noise: effects λA_i + (1−λ)I/n.
    Fuzzify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Measure the fuzzified family A^λ over a descending λ grid.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        /// Number of grid intervals; emits lambda-steps + 1 rows from λ=1 to λ=0.
        #[arg(long)]
        lambda_steps: usize,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Scan the dichotomic-qubit Σ gaps over the (ω₁, ω₂) triangle.
    Grid {
        /// Samples per axis (≥ 2).
        #[arg(long)]
        resolution: usize,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Monte-Carlo sample two successive measurements of a POVM.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        /// Density-matrix JSON file; maximally mixed when omitted.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Kind::Luder)]
        kind: Kind,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Estimate a qubit observable's measures from six-probe repeat counts.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// luder reconstructs the E-matrix, jmax the X-matrix.
        #[arg(long, value_enum, default_value_t = Kind::Luder)]
        kind: Kind,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Scan random qubit POVMs for Σ ordering violations.
    Scan {
        /// Trials per outcome count.
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Outcome counts to scan, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        n_values: Vec<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

enum CliError {
    /// Invalid domain input: exit 1.
    Domain(String),
    /// Unreadable or unparseable input, or an unsupported flag combination:
    /// exit 2.
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Domain(_) => ExitCode::from(1),
            CliError::Usage(_) => ExitCode::from(2),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Domain(m) | CliError::Usage(m) => m,
        }
    }
}

fn classify(err: unsharp_core::Error) -> CliError {
    match err {
        unsharp_core::Error::Json(e) => CliError::Usage(format!("parse error: {e}")),
        other => CliError::Domain(other.to_string()),
    }
}

fn read_povm(path: &Path) -> Result<Povm, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Povm::from_json_str(&text).map_err(classify)
}

fn read_state(path: &Path) -> Result<DensityMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    DensityMatrix::from_json_str(&text).map_err(classify)
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}"))),
    }
}

fn emit_json<T: serde::Serialize>(output: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
    text.push('\n');
    emit(output, text.as_bytes())
}

fn require(format: Format, expected: Format, command: &str) -> Result<(), CliError> {
    if format != expected {
        let name = match expected {
            Format::Json => "json",
            Format::Csv => "csv",
        };
        return Err(CliError::Usage(format!("{command} only emits {name}")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { input } => {
            let povm = read_povm(&input)?;
            println!(
                "ok: valid POVM with {} outcomes on dimension {}{}",
                povm.n_outcomes(),
                povm.dim(),
                if povm.is_pvm() { " (PVM)" } else { "" }
            );
            Ok(())
        }
        Command::Measures {
            input,
            output,
            format,
        } => {
            require(format, Format::Json, "measures")?;
            let povm = read_povm(&input)?;
            emit_json(output.as_deref(), &measure_report(&povm))
        }
        Command::Fuzzify {
            input,
            lambda,
            output,
            format,
        } => {
            require(format, Format::Json, "fuzzify")?;
            let povm = read_povm(&input)?;
            let fuzzed = povm.fuzzify_white_noise(lambda).map_err(classify)?;
            let mut text = fuzzed.to_json_string();
            text.push('\n');
            emit(output.as_deref(), text.as_bytes())
        }
        Command::Sweep {
            input,
            lambda_steps,
            output,
            format,
        } => {
            require(format, Format::Csv, "sweep")?;
            if lambda_steps == 0 {
                return Err(CliError::Usage("--lambda-steps must be at least 1".into()));
            }
            let povm = read_povm(&input)?;
            let lambdas: Vec<f64> = (0..=lambda_steps)
                .map(|k| 1.0 - k as f64 / lambda_steps as f64)
                .collect();
            let records = lambda_sweep(&povm, &lambdas).map_err(classify)?;
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, &records)
                .map_err(|e| CliError::Usage(format!("cannot format csv: {e}")))?;
            emit(output.as_deref(), &buf)
        }
        Command::Grid {
            resolution,
            output,
            format,
        } => {
            require(format, Format::Csv, "grid")?;
            let scan = dichotomic_grid_scan(resolution).map_err(classify)?;
            eprintln!(
                "grid minima: sigma_min {:.3e}, sigma_min_prime {:.3e}",
                scan.min_sigma_min, scan.min_sigma_min_prime
            );
            let mut buf = Vec::new();
            write_grid_csv(&mut buf, &scan)
                .map_err(|e| CliError::Usage(format!("cannot format csv: {e}")))?;
            emit(output.as_deref(), &buf)
        }
        Command::Simulate {
            input,
            state,
            kind,
            shots,
            seed,
            output,
            format,
        } => {
            require(format, Format::Json, "simulate")?;
            let povm = read_povm(&input)?;
            let rho = match state {
                Some(path) => read_state(&path)?,
                None => DensityMatrix::maximally_mixed(povm.dim()),
            };
            let report = simulate(&povm, &rho, kind.into(), shots, seed).map_err(classify)?;
            emit_json(output.as_deref(), &report)
        }
        Command::Estimate {
            input,
            kind,
            shots,
            seed,
            output,
            format,
        } => {
            require(format, Format::Json, "estimate")?;
            let povm = read_povm(&input)?;
            let record = match kind {
                Kind::Luder => estimate_qubit_e_matrix(&povm, shots, seed),
                Kind::Jmax => estimate_qubit_x_matrix(&povm, shots, seed),
            }
            .map_err(classify)?;
            emit_json(output.as_deref(), &record)
        }
        Command::Scan {
            trials,
            seed,
            n_values,
            output,
            format,
        } => {
            require(format, Format::Json, "scan")?;
            let report = conjecture_scan(&n_values, trials, seed).map_err(classify)?;
            emit_json(output.as_deref(), &report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}
