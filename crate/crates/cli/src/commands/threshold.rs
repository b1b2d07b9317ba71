//! The `threshold` command: worst-case error and sparsity of the soft
//! thresholding approximant over a range of budget levels, with an optional
//! log-log rate fit of the error column.

use serde_json::json;

use widths_core::{
    fit_rate, run_decay_experiment, CoreError, DecayGenerator, DecayRow, Exponent, ParamSet,
    Result,
};

use crate::commands::matrix::parse_field;
use crate::commands::Report;
use crate::config::{require, OutputFormat, PartialConfig};

const HEADER: &str = "j,k,trials,max_error,max_nonzeros,c0,c1";

pub struct ThresholdConfig {
    pub params: ParamSet,
    pub jmin: u32,
    pub jmax: u32,
    pub trials: u32,
    pub family: DecayGenerator,
    pub fit: bool,
    pub seed: u64,
    pub format: OutputFormat,
}

impl ThresholdConfig {
    pub fn resolve(c: PartialConfig) -> Result<ThresholdConfig> {
        let p1: Exponent = require(c.p1, "p1")?;
        let p2 = require(c.p2, "p2")?;
        let params = ParamSet::new(require(c.d, "d")?, require(c.t, "t")?, p1, p2, p1)?;
        let family = match c.family {
            Some(name) => name.parse()?,
            None => DecayGenerator::RandomDense,
        };
        Ok(ThresholdConfig {
            params,
            jmin: c.jmin.unwrap_or(4),
            jmax: c.jmax.unwrap_or(10),
            trials: c.trials.unwrap_or(20),
            family,
            fit: c.fit.unwrap_or(false),
            seed: c.seed.unwrap_or(0),
            format: OutputFormat::resolve(
                c.format,
                OutputFormat::Csv,
                &[OutputFormat::Csv, OutputFormat::SvgPlotData],
            )?,
        })
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "command": "threshold",
            "d": self.params.d,
            "family": self.family.name(),
            "fit": self.fit,
            "format": self.format.name(),
            "jmax": self.jmax,
            "jmin": self.jmin,
            "p1": self.params.p1,
            "p2": self.params.p2,
            "seed": self.seed,
            "t": self.params.t,
            "trials": self.trials,
        })
    }
}

pub fn run(cfg: &ThresholdConfig) -> Result<Report> {
    let rows = run_decay_experiment(
        &cfg.params,
        cfg.jmin,
        cfg.jmax,
        cfg.trials,
        cfg.seed,
        cfg.family,
    )?;
    let bytes = match cfg.format {
        OutputFormat::Csv => csv_bytes(cfg, &rows)?,
        OutputFormat::SvgPlotData => svg_bytes(cfg, &rows),
        _ => unreachable!("format validated in resolve"),
    };
    Ok(Report::ok(bytes))
}

fn csv_bytes(cfg: &ThresholdConfig, rows: &[DecayRow]) -> Result<Vec<u8>> {
    let mut s = format!("# config: {}\n{HEADER}\n", cfg.echo());
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.j, r.k, r.trials, r.max_error, r.max_nonzeros, r.c0, r.c1
        ));
    }
    if cfg.fit {
        // The guard in run_decay_experiment keeps j well below 64.
        let ns: Vec<u64> = rows.iter().map(|r| 1u64 << r.j).collect();
        let errors: Vec<f64> = rows.iter().map(|r| r.max_error).collect();
        let fit = fit_rate(&ns, &errors, cfg.params.d)?;
        s.push_str(&format!(
            "# fit: alpha={} beta={} residual={} n_lo={} n_hi={} condition={} ill_conditioned={}\n",
            fit.alpha, fit.beta, fit.residual, fit.n_lo, fit.n_hi, fit.condition,
            fit.ill_conditioned
        ));
    }
    Ok(s.into_bytes())
}

fn svg_bytes(cfg: &ThresholdConfig, rows: &[DecayRow]) -> Vec<u8> {
    let points: Vec<String> = rows
        .iter()
        .map(|r| format!("{},{}", r.j, r.max_error))
        .collect();
    format!(
        "<!-- config: {} -->\n<polyline id=\"max_error\" points=\"{}\" />\n",
        cfg.echo(),
        points.join(" ")
    )
    .into_bytes()
}

/// Parses the CSV emitted by the `threshold` command back into the rows the
/// experiment produced. Comment lines (config echo, fit block) are skipped.
pub fn parse_threshold_csv(text: &str) -> Result<Vec<DecayRow>> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != HEADER {
                return Err(CoreError::invalid(format!(
                    "expected header {HEADER:?}, got {line:?}"
                )));
            }
            saw_header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(CoreError::invalid(format!(
                "expected 7 fields per row, got {} in {line:?}",
                f.len()
            )));
        }
        rows.push(DecayRow {
            j: parse_field(f[0], "j")?,
            k: parse_field(f[1], "k")?,
            trials: parse_field(f[2], "trials")?,
            max_error: parse_field(f[3], "max_error")?,
            max_nonzeros: parse_field(f[4], "max_nonzeros")?,
            c0: parse_field(f[5], "c0")?,
            c1: parse_field(f[6], "c1")?,
        });
    }
    if !saw_header {
        return Err(CoreError::invalid("threshold CSV has no header row"));
    }
    Ok(rows)
}
