//! Config loading and the flags > config file > defaults precedence.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use widths_core::{CoreError, Exponent, Result};

/// Every tunable of every command, all optional. Flags fill a `PartialConfig`,
/// so does a `--config` file, and [`PartialConfig::or`] stacks them; each
/// command then resolves its own slice of the result against its defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub command: Option<String>,
    pub m: Option<u32>,
    pub p1: Option<Exponent>,
    pub p2: Option<Exponent>,
    pub kinds: Option<String>,
    pub restarts: Option<u32>,
    pub max_iter: Option<u32>,
    pub d: Option<u32>,
    pub t: Option<f64>,
    pub scale: Option<String>,
    pub jmin: Option<u32>,
    pub jmax: Option<u32>,
    pub trials: Option<u32>,
    pub family: Option<String>,
    pub fit: Option<bool>,
    pub fault: Option<String>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
}

impl PartialConfig {
    /// `self` wins; holes fall through to `fallback`.
    pub fn or(self, fallback: PartialConfig) -> PartialConfig {
        macro_rules! pick {
            ($($f:ident),* $(,)?) => {
                PartialConfig { $($f: self.$f.or(fallback.$f)),* }
            };
        }
        pick!(
            command, m, p1, p2, kinds, restarts, max_iter, d, t, scale, jmin, jmax, trials,
            family, fit, fault, seed, format, out,
        )
    }
}

pub fn load_config(path: &Path) -> Result<PartialConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CoreError::invalid(format!("cannot read config file {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| CoreError::invalid(format!("bad config file {}: {e}", path.display())))
}

/// A parameter with no usable default.
pub fn require<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| {
        CoreError::invalid(format!(
            "missing required parameter `{name}` (pass --{name} or set \"{name}\" in --config)"
        ))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    SvgPlotData,
    Text,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::SvgPlotData => "svg-plot-data",
            OutputFormat::Text => "text",
        }
    }

    fn parse(s: &str) -> Result<OutputFormat> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg-plot-data" => Ok(OutputFormat::SvgPlotData),
            "text" => Ok(OutputFormat::Text),
            other => Err(CoreError::invalid(format!(
                "unknown format {other:?}; expected csv, json, svg-plot-data or text"
            ))),
        }
    }

    /// Applies the per-command default and allow-list.
    pub fn resolve(
        requested: Option<String>,
        default: OutputFormat,
        allowed: &[OutputFormat],
    ) -> Result<OutputFormat> {
        let format = match requested {
            Some(s) => OutputFormat::parse(&s)?,
            None => default,
        };
        if !allowed.contains(&format) {
            let names: Vec<&str> = allowed.iter().map(|f| f.name()).collect();
            return Err(CoreError::invalid(format!(
                "format {} is not supported by this command; allowed: {}",
                format.name(),
                names.join(", ")
            )));
        }
        Ok(format)
    }
}
