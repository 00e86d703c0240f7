//! Experiment runner behind the `strategic` binary.
//!
//! Every command resolves its flags into an [`ExperimentConfig`], validates
//! it, and writes JSON/CSV artifacts whose header embeds the format version,
//! the tool version and the full resolved config. Runs are deterministic:
//! the same config and seed produce byte-identical files.
//!
//! Times are given in units of `π` in the exact-number syntax accepted by
//! [`ExactReal`](crate::diophantine::ExactReal), so `--times 0,1/3` means
//! `t = 0` and `t = π/3`.
//!
//! Exit codes: 0 success, 2 validation, 3 singular mode, 4 IO.

mod config;
mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{CommandKind, ExperimentConfig, ScanKind, SystemKind, OUT_DIR_ENV};
pub use run::{exit_code, run, Outcome, EXIT_IO, EXIT_OK, EXIT_SINGULAR, EXIT_VALIDATION};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "strategic", version, about = "Certify observation-time pairs and reconstruct initial data from snapshots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write snapshot files of seeded random initial data at the given times.
    Simulate(Flags),
    /// Certify a gap for the chosen system; writes the certificate and a floor CSV.
    Certify(Flags),
    /// Recover initial data from snapshot files.
    Reconstruct(Flags),
    /// Build a rational gap near --tau avoiding every sine zero of the loaded string.
    Construct(Flags),
    /// Parameter scans: floor, multi-time, noise, sensitivity, loaded-gap, shift.
    Scan(Flags),
}

/// Flags shared by all commands; each command ignores what it does not use.
#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    #[arg(long, value_enum)]
    pub system: Option<SystemKind>,
    /// Potential of the loaded string (exact syntax).
    #[arg(long)]
    pub q: Option<String>,
    /// ξ = (t0 - t1)/π (exact syntax, e.g. `quad:(-1+1*sqrt(5))/2`, `rat:1/3`).
    #[arg(long, allow_hyphen_values = true)]
    pub gap: Option<String>,
    /// Observation times in units of π, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub times: Vec<String>,
    /// Sobolev orders `r,s`.
    #[arg(long)]
    pub orders: Option<String>,
    /// Truncation: `N`, or `MxN` for the plate.
    #[arg(long)]
    pub modes: Option<String>,
    #[arg(long)]
    pub kmax: Option<u64>,
    /// Plate scan box `MxN`.
    #[arg(long = "box")]
    pub scan_box: Option<String>,
    /// Plate sides in units of π.
    #[arg(long)]
    pub plate_a: Option<String>,
    #[arg(long)]
    pub plate_b: Option<String>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random coefficients are damped by `w^{-decay}`.
    #[arg(long)]
    pub decay: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, value_enum)]
    pub kind: Option<ScanKind>,
    /// Upper bound on the shift index for `loaded-gap` and `shift` scans.
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Snapshot files to reconstruct from (default: `snapshot_*.json` in the output directory).
    #[arg(long, value_delimiter = ',')]
    pub input: Vec<PathBuf>,
    /// Position and velocity files of the true initial data, for error columns.
    #[arg(long, value_delimiter = ',')]
    pub truth: Vec<PathBuf>,
    /// Output directory (default: `$STRATEGIC_OUT_DIR`, else `strategic-out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::Simulate(f) => (CommandKind::Simulate, f),
            Command::Certify(f) => (CommandKind::Certify, f),
            Command::Reconstruct(f) => (CommandKind::Reconstruct, f),
            Command::Construct(f) => (CommandKind::Construct, f),
            Command::Scan(f) => (CommandKind::Scan, f),
        }
    }
}

/// Parses `args` (including the program name), runs, prints a summary and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (kind, flags) = cli.command.split();
    let config = match ExperimentConfig::from_flags(kind, &flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match run(&config) {
        Ok(out) => {
            // a closed pipe (`| head`) is not an error of the run
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", out.summary);
            for f in &out.files {
                let _ = writeln!(stdout, "wrote {}", f.display());
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
