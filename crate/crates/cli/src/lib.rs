//! Library surface of the `widths-lab` binary. The whole CLI lives behind
//! [`run`], which maps an argument vector to an exit code plus the exact
//! bytes written to stdout, so the determinism tests can compare runs bit
//! for bit. Diagnostics go to the error stream only.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage or validation error,
//! 3 boundary/regime/guard violation.

mod commands;
mod config;

pub use commands::matrix::{parse_matrix_csv, MatrixRow, MATRIX_DIM_CAP};
pub use commands::threshold::parse_threshold_csv;
pub use commands::verify::CHECK_NAMES;
pub use config::PartialConfig;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use widths_core::{CoreError, Exponent, Result};

use commands::Report;

#[derive(Parser)]
#[command(
    name = "widths-lab",
    version,
    about = "Width tables, decay experiments and rate classification for p-norm embeddings"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Width table for the identity embedding l_p1^m -> l_p2^m
    Matrix(MatrixArgs),
    /// Decay exponents of the width families for one parameter set
    Rates(RatesArgs),
    /// Soft-thresholding decay experiment over a range of budget levels
    Threshold(ThresholdArgs),
    /// Cross-module invariant battery with optional fault injection
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON file supplying defaults for any flag of this command
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the report to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Master seed for every derived random stream
    #[arg(long)]
    seed: Option<u64>,
    /// Output format (each command lists its own choices)
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct MatrixArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Ambient dimension of the identity embedding
    #[arg(long)]
    m: Option<u32>,
    /// Source exponent: a number >= 1 or "inf"
    #[arg(long)]
    p1: Option<Exponent>,
    /// Target exponent: a number >= 1 or "inf"
    #[arg(long)]
    p2: Option<Exponent>,
    /// Comma-separated width kinds, or "all"
    #[arg(long)]
    kinds: Option<String>,
    /// Random restarts per width search
    #[arg(long)]
    restarts: Option<u32>,
    /// Iteration cap per search run
    #[arg(long)]
    max_iter: Option<u32>,
}

#[derive(Args)]
struct RatesArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Smoothness scale: isotropic or mixed
    #[arg(long)]
    scale: Option<String>,
    /// Domain dimension
    #[arg(long)]
    d: Option<u32>,
    /// Smoothness order
    #[arg(long)]
    t: Option<f64>,
    /// Source exponent
    #[arg(long)]
    p1: Option<Exponent>,
    /// Target exponent
    #[arg(long)]
    p2: Option<Exponent>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Domain dimension
    #[arg(long)]
    d: Option<u32>,
    /// Smoothness order
    #[arg(long)]
    t: Option<f64>,
    /// Source exponent
    #[arg(long)]
    p1: Option<Exponent>,
    /// Target exponent
    #[arg(long)]
    p2: Option<Exponent>,
    /// Smallest budget level
    #[arg(long)]
    jmin: Option<u32>,
    /// Largest budget level
    #[arg(long)]
    jmax: Option<u32>,
    /// Random fields per budget level
    #[arg(long)]
    trials: Option<u32>,
    /// Field family: random-dense, block-concentrated or single-level-flat
    #[arg(long)]
    family: Option<String>,
    /// Append a log-log rate fit of the error column
    #[arg(long)]
    fit: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Perturb the named check's data to prove the harness catches it
    #[arg(long, value_name = "CHECK")]
    fault: Option<String>,
    /// Random restarts per width search
    #[arg(long)]
    restarts: Option<u32>,
    /// Iteration cap per search run
    #[arg(long)]
    max_iter: Option<u32>,
}

pub fn run(args: &[String]) -> (i32, Vec<u8>) {
    let mut argv = Vec::with_capacity(args.len() + 1);
    argv.push("widths-lab".to_string());
    argv.extend_from_slice(args);
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return (0, e.to_string().into_bytes());
        }
        Err(e) => {
            eprint!("{e}");
            return (2, Vec::new());
        }
    };
    match execute(cli.cmd) {
        Ok((report, None)) => (report.code, report.bytes),
        Ok((report, Some(path))) => match std::fs::write(&path, &report.bytes) {
            Ok(()) => (report.code, Vec::new()),
            Err(e) => {
                eprintln!("widths-lab: cannot write {}: {e}", path.display());
                (2, Vec::new())
            }
        },
        Err(e) => {
            eprintln!("widths-lab: {e}");
            (exit_code(&e), Vec::new())
        }
    }
}

fn exit_code(e: &CoreError) -> i32 {
    match e {
        CoreError::InvalidInput(_) => 2,
        CoreError::Boundary(_) | CoreError::Guard(_) => 3,
    }
}

fn execute(cmd: Cmd) -> Result<(Report, Option<PathBuf>)> {
    match cmd {
        Cmd::Matrix(a) => {
            let merged = merge(a.partial(), &a.common, "matrix")?;
            let out = merged.out.clone();
            let cfg = commands::matrix::MatrixConfig::resolve(merged)?;
            Ok((commands::matrix::run(&cfg)?, out))
        }
        Cmd::Rates(a) => {
            let merged = merge(a.partial(), &a.common, "rates")?;
            let out = merged.out.clone();
            let cfg = commands::rates::RatesConfig::resolve(merged)?;
            Ok((commands::rates::run(&cfg)?, out))
        }
        Cmd::Threshold(a) => {
            let merged = merge(a.partial(), &a.common, "threshold")?;
            let out = merged.out.clone();
            let cfg = commands::threshold::ThresholdConfig::resolve(merged)?;
            Ok((commands::threshold::run(&cfg)?, out))
        }
        Cmd::Verify(a) => {
            let merged = merge(a.partial(), &a.common, "verify")?;
            let out = merged.out.clone();
            let cfg = commands::verify::VerifyConfig::resolve(merged)?;
            Ok((commands::verify::run(&cfg)?, out))
        }
    }
}

/// Flags override the config file, which overrides command defaults.
fn merge(flags: PartialConfig, common: &CommonArgs, command: &str) -> Result<PartialConfig> {
    let file = match &common.config {
        Some(path) => config::load_config(path)?,
        None => PartialConfig::default(),
    };
    if let Some(c) = &file.command {
        if c != command {
            return Err(CoreError::invalid(format!(
                "config file sets command = {c:?} but the {command} command was invoked"
            )));
        }
    }
    Ok(flags.or(file))
}

impl CommonArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            seed: self.seed,
            format: self.format.clone(),
            out: self.out.clone(),
            ..PartialConfig::default()
        }
    }
}

impl MatrixArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            m: self.m,
            p1: self.p1,
            p2: self.p2,
            kinds: self.kinds.clone(),
            restarts: self.restarts,
            max_iter: self.max_iter,
            ..self.common.partial()
        }
    }
}

impl RatesArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            scale: self.scale.clone(),
            d: self.d,
            t: self.t,
            p1: self.p1,
            p2: self.p2,
            ..self.common.partial()
        }
    }
}

impl ThresholdArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            d: self.d,
            t: self.t,
            p1: self.p1,
            p2: self.p2,
            jmin: self.jmin,
            jmax: self.jmax,
            trials: self.trials,
            family: self.family.clone(),
            // The bare flag can only switch the fit on; absence must fall
            // through to the config file.
            fit: if self.fit { Some(true) } else { None },
            ..self.common.partial()
        }
    }
}

impl VerifyArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            fault: self.fault.clone(),
            restarts: self.restarts,
            max_iter: self.max_iter,
            ..self.common.partial()
        }
    }
}
