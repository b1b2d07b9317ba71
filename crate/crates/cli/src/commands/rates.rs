//! The `rates` command: decay exponents of the width families for one
//! embedding parameter set, reported as JSON.

use serde_json::{json, Map, Value};

use widths_core::{
    bernstein_rate_isotropic, bernstein_rate_mixed, nonlinear_width_rate, weyl_rate_isotropic,
    weyl_rate_mixed, CoreError, ParamSet, RateExponents, RateScale, Result,
};

use crate::commands::Report;
use crate::config::{require, OutputFormat, PartialConfig};

pub struct RatesConfig {
    pub scale: RateScale,
    pub params: ParamSet,
    pub seed: u64,
}

impl RatesConfig {
    pub fn resolve(c: PartialConfig) -> Result<RatesConfig> {
        let scale: RateScale = require(c.scale, "scale")?.parse()?;
        let p1 = require(c.p1, "p1")?;
        let p2 = require(c.p2, "p2")?;
        let params = ParamSet::new(require(c.d, "d")?, require(c.t, "t")?, p1, p2, p1)?;
        OutputFormat::resolve(c.format, OutputFormat::Json, &[OutputFormat::Json])?;
        Ok(RatesConfig {
            scale,
            params,
            seed: c.seed.unwrap_or(0),
        })
    }

    fn echo(&self) -> Value {
        json!({
            "command": "rates",
            "d": self.params.d,
            "format": "json",
            "p1": self.params.p1,
            "p2": self.params.p2,
            "scale": scale_name(self.scale),
            "seed": self.seed,
            "t": self.params.t,
        })
    }
}

fn scale_name(s: RateScale) -> &'static str {
    match s {
        RateScale::Isotropic => "isotropic",
        RateScale::Mixed => "mixed",
    }
}

/// The roman-numeral or keyword part of a case label.
fn short_case(label: &str) -> &str {
    if let Some((_, c)) = label.split_once("-case-") {
        c
    } else if label.ends_with("-open") {
        "open"
    } else if let Some(s) = label.strip_prefix("nonlinear-") {
        s
    } else {
        label
    }
}

fn entry(re: &RateExponents) -> Value {
    let mut m = Map::new();
    m.insert("alpha".into(), json!(re.alpha));
    match re.beta() {
        Some(b) => {
            m.insert("beta".into(), json!(b));
        }
        None => {
            m.insert("beta_lo".into(), json!(re.beta_lo));
            m.insert("beta_hi".into(), json!(re.beta_hi));
        }
    }
    m.insert("case".into(), json!(short_case(&re.case)));
    m.insert("two_sided".into(), json!(re.two_sided));
    Value::Object(m)
}

pub fn run(cfg: &RatesConfig) -> Result<Report> {
    let results: [(&str, Result<RateExponents>); 3] = match cfg.scale {
        RateScale::Isotropic => [
            ("bernstein", bernstein_rate_isotropic(&cfg.params)),
            ("weyl", weyl_rate_isotropic(&cfg.params)),
            ("nonlinear", nonlinear_width_rate(&cfg.params, cfg.scale)),
        ],
        RateScale::Mixed => [
            ("bernstein", bernstein_rate_mixed(&cfg.params)),
            ("weyl", weyl_rate_mixed(&cfg.params)),
            ("nonlinear", nonlinear_width_rate(&cfg.params, cfg.scale)),
        ],
    };
    let mut entries = Map::new();
    let mut applicable = 0;
    let mut first_reason = None;
    for (name, res) in results {
        match res {
            Ok(re) => {
                applicable += 1;
                entries.insert(name.into(), entry(&re));
            }
            // A guard-band or uncovered-regime hit poisons the whole query:
            // the caller asked about parameters the tables cannot classify.
            Err(e @ (CoreError::Boundary(_) | CoreError::Guard(_))) => return Err(e),
            Err(CoreError::InvalidInput(msg)) => {
                if first_reason.is_none() {
                    first_reason = Some(msg.clone());
                }
                entries.insert(name.into(), json!({ "applicable": false, "reason": msg }));
            }
        }
    }
    if applicable == 0 {
        return Err(CoreError::invalid(format!(
            "no rate table applies: {}",
            first_reason.unwrap_or_default()
        )));
    }
    let doc = json!({
        "config": cfg.echo(),
        "entries": Value::Object(entries),
        "scale": scale_name(cfg.scale),
    });
    let mut bytes = serde_json::to_string_pretty(&doc)
        .expect("serializing a finite JSON value")
        .into_bytes();
    bytes.push(b'\n');
    Ok(Report::ok(bytes))
}
