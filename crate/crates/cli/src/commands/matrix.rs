//! The `matrix` command: width tables for the identity embedding
//! `id: l_p1^m -> l_p2^m`, one profile per requested width family.

use std::str::FromStr;

use serde_json::json;

use widths_core::{
    width_profile, CoreError, Direction, Exponent, FiniteOperator, OptimBudget, Result, WidthKind,
};

use crate::commands::Report;
use crate::config::{require, OutputFormat, PartialConfig};

/// Largest ambient dimension the searches resolve at interactive cost.
pub const MATRIX_DIM_CAP: u32 = 16;

const HEADER: &str = "kind,n,value,direction,converged";

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRow {
    pub kind: WidthKind,
    pub n: u32,
    pub value: f64,
    pub direction: Direction,
    pub converged: bool,
}

pub struct MatrixConfig {
    pub m: u32,
    pub p1: Exponent,
    pub p2: Exponent,
    pub kinds: Vec<WidthKind>,
    kinds_raw: String,
    pub budget: OptimBudget,
    pub format: OutputFormat,
}

impl MatrixConfig {
    pub fn resolve(c: PartialConfig) -> Result<MatrixConfig> {
        let def = OptimBudget::default();
        let kinds_raw = c.kinds.unwrap_or_else(|| "all".to_string());
        Ok(MatrixConfig {
            m: require(c.m, "m")?,
            p1: require(c.p1, "p1")?,
            p2: require(c.p2, "p2")?,
            kinds: parse_kinds(&kinds_raw)?,
            kinds_raw,
            budget: OptimBudget {
                restarts: c.restarts.unwrap_or(def.restarts),
                max_iter: c.max_iter.unwrap_or(def.max_iter),
                seed: c.seed.unwrap_or(def.seed),
            },
            format: OutputFormat::resolve(
                c.format,
                OutputFormat::Csv,
                &[OutputFormat::Csv, OutputFormat::SvgPlotData],
            )?,
        })
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "command": "matrix",
            "format": self.format.name(),
            "kinds": self.kinds_raw,
            "m": self.m,
            "max_iter": self.budget.max_iter,
            "p1": self.p1,
            "p2": self.p2,
            "restarts": self.budget.restarts,
            "seed": self.budget.seed,
        })
    }
}

fn parse_kinds(raw: &str) -> Result<Vec<WidthKind>> {
    if raw.trim() == "all" {
        return Ok(WidthKind::ALL.to_vec());
    }
    raw.split(',').map(WidthKind::from_str).collect()
}

pub fn run(cfg: &MatrixConfig) -> Result<Report> {
    if cfg.m == 0 {
        return Err(CoreError::invalid("m must be >= 1"));
    }
    if cfg.m > MATRIX_DIM_CAP {
        return Err(CoreError::guard(format!(
            "m = {} exceeds the dimension cap {MATRIX_DIM_CAP}",
            cfg.m
        )));
    }
    let op = FiniteOperator::identity_of(cfg.m as usize, cfg.p1, cfg.p2)?;
    let mut rows = Vec::with_capacity(cfg.kinds.len() * cfg.m as usize);
    for kind in &cfg.kinds {
        for est in width_profile(&op, *kind, cfg.m as usize, &cfg.budget)? {
            rows.push(MatrixRow {
                kind: *kind,
                n: est.n as u32,
                value: est.value,
                direction: est.direction,
                converged: est.diagnostics.converged,
            });
        }
    }
    let bytes = match cfg.format {
        OutputFormat::Csv => csv_bytes(cfg, &rows),
        OutputFormat::SvgPlotData => svg_bytes(cfg, &rows),
        _ => unreachable!("format validated in resolve"),
    };
    Ok(Report::ok(bytes))
}

fn csv_bytes(cfg: &MatrixConfig, rows: &[MatrixRow]) -> Vec<u8> {
    let mut s = format!("# config: {}\n{HEADER}\n", cfg.echo());
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.kind.name(),
            r.n,
            r.value,
            r.direction.name(),
            r.converged
        ));
    }
    s.into_bytes()
}

fn svg_bytes(cfg: &MatrixConfig, rows: &[MatrixRow]) -> Vec<u8> {
    let mut s = format!("<!-- config: {} -->\n", cfg.echo());
    for kind in &cfg.kinds {
        let points: Vec<String> = rows
            .iter()
            .filter(|r| r.kind == *kind)
            .map(|r| format!("{},{}", r.n, r.value))
            .collect();
        s.push_str(&format!(
            "<polyline id=\"{}\" points=\"{}\" />\n",
            kind.name(),
            points.join(" ")
        ));
    }
    s.into_bytes()
}

/// Parses the CSV emitted by the `matrix` command back into typed rows.
/// Comment lines are skipped; the header row is mandatory.
pub fn parse_matrix_csv(text: &str) -> Result<Vec<MatrixRow>> {
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
        if f.len() != 5 {
            return Err(CoreError::invalid(format!(
                "expected 5 fields per row, got {} in {line:?}",
                f.len()
            )));
        }
        rows.push(MatrixRow {
            kind: WidthKind::from_str(f[0])?,
            n: parse_field(f[1], "n")?,
            value: parse_field(f[2], "value")?,
            direction: Direction::from_str(f[3])?,
            converged: parse_field(f[4], "converged")?,
        });
    }
    if !saw_header {
        return Err(CoreError::invalid("matrix CSV has no header row"));
    }
    Ok(rows)
}

pub(crate) fn parse_field<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| CoreError::invalid(format!("cannot parse {what} from {s:?}")))
}
