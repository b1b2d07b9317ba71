//! Closed-form decay-rate tables and empirical rate fitting.
//!
//! Every classifier maps a parameter set to the exponents (alpha, beta) of
//! the width asymptotics `n^{-alpha} (log n)^{(d-1) beta}`, choosing among
//! the finitely many regimes by strict inequalities in t, p1, p2. Parameters
//! within the guard band of a regime boundary are rejected: the formulas on
//! the two sides genuinely differ there, so no answer would be honest. On
//! shared boundaries where adjacent formulas agree (all the p-boundaries do)
//! the first matching case wins.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{boundary, invalid, Result};
use crate::exponent::Exponent;
use crate::params::{band_check, ParamSet};

/// Decay exponents of one width scale, with the selecting case recorded.
/// `beta_lo == beta_hi` except for the one regime the theory leaves open,
/// which gets the interval of the known lower and upper bounds.
#[derive(Clone, Debug, Serialize)]
pub struct RateExponents {
    pub alpha: f64,
    pub beta_lo: f64,
    pub beta_hi: f64,
    /// Case identifier, e.g. "bernstein-mixed-case-ii".
    pub case: String,
    /// False when only an upper bound is established.
    pub two_sided: bool,
    /// The strict inequalities that selected the case.
    pub preconditions: Vec<String>,
}

impl RateExponents {
    fn point(alpha: f64, beta: f64, case: &str, two_sided: bool, pre: Vec<String>) -> Self {
        RateExponents {
            alpha,
            beta_lo: beta,
            beta_hi: beta,
            case: case.to_string(),
            two_sided,
            preconditions: pre,
        }
    }

    /// The log exponent when it is a point, None for the open interval.
    pub fn beta(&self) -> Option<f64> {
        (self.beta_lo == self.beta_hi).then_some(self.beta_lo)
    }

    pub fn is_interval(&self) -> bool {
        self.beta_lo != self.beta_hi
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(invalid(msg.to_string()))
    }
}

/// Threshold `(1/p2 - 1/p1) / (p1/2 - 1)` separating the large-p cases.
/// Only evaluated when p1 > 2, where the denominator is positive.
fn cross_threshold(p1: Exponent, p2: Exponent) -> f64 {
    (p2.recip() - p1.recip()) / (p1.value() / 2.0 - 1.0)
}

/// Bernstein widths on the isotropic scale: always a pure power `n^{-alpha}`.
pub fn bernstein_rate_isotropic(params: &ParamSet) -> Result<RateExponents> {
    let compact = params.isotropic_compact()?;
    require(compact, "embedding not compact: t/d must exceed (1/p1 - 1/p2)_+")?;
    let (p1, p2) = (params.p1.value(), params.p2.value());
    let td = params.t / params.d as f64;
    let r1 = params.p1.recip();
    let r2 = params.p2.recip();
    let case = "bernstein-isotropic-case-";

    if p1 <= p2 || p1 <= 2.0 {
        // Covers p1 <= p2 and p2 < p1 <= 2.
        return Ok(RateExponents::point(
            td,
            0.0,
            &format!("{case}i"),
            true,
            vec!["p1 <= p2 or p1 <= 2".into()],
        ));
    }
    // From here p2 < p1 and p1 > 2.
    if p2 <= 2.0 {
        if band_check(td - r1, "t/d vs 1/p1")? {
            return Ok(RateExponents::point(
                td - r1 + 0.5,
                0.0,
                &format!("{case}ii"),
                true,
                vec!["p2 <= 2 < p1".into(), "t/d > 1/p1".into()],
            ));
        }
        if p2 <= 1.0 {
            return Err(boundary(
                "limiting case not covered: p2 <= 1 with p1 > 2 and t/d < 1/p1",
            ));
        }
        return Ok(RateExponents::point(
            td * p1 / 2.0,
            0.0,
            &format!("{case}iv"),
            true,
            vec!["1 < p2 <= 2 < p1".into(), "t/d < 1/p1".into()],
        ));
    }
    let thr = cross_threshold(params.p1, params.p2);
    if band_check(td - thr, "t/d vs (1/p2 - 1/p1)/(p1/2 - 1)")? {
        Ok(RateExponents::point(
            td + r2 - r1,
            0.0,
            &format!("{case}iii"),
            true,
            vec![
                "2 < p2 < p1".into(),
                "t/d > (1/p2 - 1/p1)/(p1/2 - 1)".into(),
            ],
        ))
    } else {
        Ok(RateExponents::point(
            td * p1 / 2.0,
            0.0,
            &format!("{case}iv"),
            true,
            vec![
                "2 < p2 < p1".into(),
                "t/d < (1/p2 - 1/p1)/(p1/2 - 1)".into(),
            ],
        ))
    }
}

/// Bernstein widths on the mixed scale: `n^{-alpha} (log n)^{(d-1) beta}`.
/// For 2 < p1 < p2 the log exponent is only known to lie in an interval.
pub fn bernstein_rate_mixed(params: &ParamSet) -> Result<RateExponents> {
    require(
        params.p2.value() > 1.0 && !params.p2.is_infinite(),
        "mixed Bernstein rates require 1 < p2 < \u{221e}",
    )?;
    let compact = params.mixed_compact()?;
    require(compact, "embedding not compact: t must exceed (1/p1 - 1/p2)_+")?;
    let (p1, p2) = (params.p1.value(), params.p2.value());
    let t = params.t;
    let r1 = params.p1.recip();
    let case = "bernstein-mixed-case-";

    if p1 <= 2.0 {
        if p2 <= 2.0 && !band_check(t - (r1 - 0.5), "t vs 1/p1 - 1/2")? {
            return Ok(RateExponents::point(
                t,
                0.0,
                &format!("{case}i"),
                true,
                vec!["p1, p2 <= 2".into(), "t < 1/p1 - 1/2".into()],
            ));
        }
        return Ok(RateExponents::point(
            t,
            t + 0.5 - r1,
            &format!("{case}ii"),
            true,
            vec!["p1 <= 2".into(), "p2 > 2 or t > 1/p1 - 1/2".into()],
        ));
    }
    if p2 <= 2.0 {
        if band_check(t - r1, "t vs 1/p1")? {
            return Ok(RateExponents::point(
                t - r1 + 0.5,
                t - r1 + 0.5,
                &format!("{case}iii"),
                true,
                vec!["p2 <= 2 < p1".into(), "t > 1/p1".into()],
            ));
        }
        return Ok(RateExponents::point(
            t * p1 / 2.0,
            t - r1 + 0.5,
            &format!("{case}v"),
            true,
            vec!["p2 <= 2 < p1".into(), "t < 1/p1".into()],
        ));
    }
    if p2 <= p1 {
        let thr = cross_threshold(params.p1, params.p2);
        if band_check(t - thr, "t vs (1/p2 - 1/p1)/(p1/2 - 1)")? {
            return Ok(RateExponents::point(
                t + params.p2.recip() - r1,
                t + params.p2.recip() - r1,
                &format!("{case}iv"),
                true,
                vec![
                    "2 < p2 <= p1".into(),
                    "t > (1/p2 - 1/p1)/(p1/2 - 1)".into(),
                ],
            ));
        }
        return Ok(RateExponents::point(
            t * p1 / 2.0,
            t - r1 + 0.5,
            &format!("{case}v"),
            true,
            vec![
                "2 < p2 <= p1".into(),
                "t < (1/p2 - 1/p1)/(p1/2 - 1)".into(),
            ],
        ));
    }
    // 2 < p1 < p2: only the enclosing bounds are known.
    Ok(RateExponents {
        alpha: t,
        beta_lo: t,
        beta_hi: t - r1 + 0.5,
        case: "bernstein-mixed-open".to_string(),
        two_sided: false,
        preconditions: vec!["2 < p1 < p2".into()],
    })
}

/// Weyl numbers on the isotropic scale.
pub fn weyl_rate_isotropic(params: &ParamSet) -> Result<RateExponents> {
    let compact = params.isotropic_compact()?;
    require(compact, "embedding not compact: t/d must exceed (1/p1 - 1/p2)_+")?;
    let (p1, p2) = (params.p1.value(), params.p2.value());
    let td = params.t / params.d as f64;
    let r1 = params.p1.recip();
    let r2 = params.p2.recip();
    let case = "weyl-isotropic-case-";

    if p1 <= 2.0 {
        if p2 <= 2.0 {
            return Ok(RateExponents::point(
                td,
                0.0,
                &format!("{case}i"),
                true,
                vec!["p1, p2 <= 2".into()],
            ));
        }
        return Ok(RateExponents::point(
            td + r2 - 0.5,
            0.0,
            &format!("{case}ii"),
            true,
            vec!["p1 <= 2 < p2".into()],
        ));
    }
    if p2 <= 2.0 {
        if band_check(td - r1, "t/d vs 1/p1")? {
            return Ok(RateExponents::point(
                td - r1 + 0.5,
                0.0,
                &format!("{case}iii"),
                true,
                vec!["p2 <= 2 < p1".into(), "t/d > 1/p1".into()],
            ));
        }
        return Ok(RateExponents::point(
            td * p1 / 2.0,
            0.0,
            &format!("{case}v"),
            true,
            vec!["p2 <= 2 < p1".into(), "t/d < 1/p1".into()],
        ));
    }
    if p1 <= p2 {
        return Ok(RateExponents::point(
            td + r2 - r1,
            0.0,
            &format!("{case}iv"),
            true,
            vec!["2 < p1 <= p2".into()],
        ));
    }
    let thr = cross_threshold(params.p1, params.p2);
    if band_check(td - thr, "t/d vs (1/p2 - 1/p1)/(p1/2 - 1)")? {
        Ok(RateExponents::point(
            td + r2 - r1,
            0.0,
            &format!("{case}iv"),
            true,
            vec![
                "2 < p2 < p1".into(),
                "t/d > (1/p2 - 1/p1)/(p1/2 - 1)".into(),
            ],
        ))
    } else {
        Ok(RateExponents::point(
            td * p1 / 2.0,
            0.0,
            &format!("{case}v"),
            true,
            vec![
                "2 < p2 < p1".into(),
                "t/d < (1/p2 - 1/p1)/(p1/2 - 1)".into(),
            ],
        ))
    }
}

/// Weyl numbers on the mixed scale.
pub fn weyl_rate_mixed(params: &ParamSet) -> Result<RateExponents> {
    require(
        !params.p2.is_infinite(),
        "mixed Weyl rates require p2 < \u{221e}",
    )?;
    let compact = params.mixed_compact()?;
    require(compact, "embedding not compact: t must exceed (1/p1 - 1/p2)_+")?;
    let (p1, p2) = (params.p1.value(), params.p2.value());
    let t = params.t;
    let r1 = params.p1.recip();
    let r2 = params.p2.recip();
    let case = "weyl-mixed-case-";

    if p1 <= 2.0 {
        if p2 <= 2.0 {
            if !band_check(t - (r1 - 0.5), "t vs 1/p1 - 1/2")? {
                return Ok(RateExponents::point(
                    t,
                    0.0,
                    &format!("{case}i"),
                    true,
                    vec!["p1, p2 <= 2".into(), "t < 1/p1 - 1/2".into()],
                ));
            }
            return Ok(RateExponents::point(
                t,
                t + 0.5 - r1,
                &format!("{case}ii"),
                true,
                vec!["p1, p2 <= 2".into(), "t > 1/p1 - 1/2".into()],
            ));
        }
        return Ok(RateExponents::point(
            t - 0.5 + r2,
            t + r2 - r1,
            &format!("{case}iii"),
            true,
            vec!["p1 <= 2 < p2".into()],
        ));
    }
    if p2 <= 2.0 {
        if band_check(t - r1, "t vs 1/p1")? {
            return Ok(RateExponents::point(
                t - r1 + 0.5,
                t - r1 + 0.5,
                &format!("{case}iv"),
                true,
                vec!["p2 <= 2 < p1".into(), "t > 1/p1".into()],
            ));
        }
        return Ok(RateExponents::point(
            t * p1 / 2.0,
            t + 0.5 - r1,
            &format!("{case}vi"),
            true,
            vec!["p2 <= 2 < p1".into(), "t < 1/p1".into()],
        ));
    }
    if p1 <= p2 {
        return Ok(RateExponents::point(
            t - r1 + r2,
            t - r1 + r2,
            &format!("{case}v"),
            true,
            vec!["2 < p1 <= p2".into()],
        ));
    }
    let thr = cross_threshold(params.p1, params.p2);
    if band_check(t - thr, "t vs (1/p2 - 1/p1)/(p1/2 - 1)")? {
        Ok(RateExponents::point(
            t - r1 + r2,
            t - r1 + r2,
            &format!("{case}v"),
            true,
            vec![
                "2 < p2 < p1".into(),
                "t > (1/p2 - 1/p1)/(p1/2 - 1)".into(),
            ],
        ))
    } else {
        Ok(RateExponents::point(
            t * p1 / 2.0,
            t + 0.5 - r1,
            &format!("{case}vi"),
            true,
            vec![
                "2 < p2 < p1".into(),
                "t < (1/p2 - 1/p1)/(p1/2 - 1)".into(),
            ],
        ))
    }
}

/// Which smoothness scale a query concerns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateScale {
    Isotropic,
    Mixed,
}

impl std::str::FromStr for RateScale {
    type Err = crate::error::CoreError;

    fn from_str(s: &str) -> Result<RateScale> {
        match s {
            "isotropic" => Ok(RateScale::Isotropic),
            "mixed" => Ok(RateScale::Mixed),
            other => Err(invalid(format!(
                "unknown scale {other:?}; expected isotropic or mixed"
            ))),
        }
    }
}

/// Manifold-width rates. The isotropic rate is two-sided; the mixed rate is
/// the constructive upper bound realized by the thresholding scheme.
pub fn nonlinear_width_rate(params: &ParamSet, scale: RateScale) -> Result<RateExponents> {
    match scale {
        RateScale::Isotropic => {
            let compact = params.isotropic_compact()?;
            require(compact, "embedding not compact: t/d must exceed (1/p1 - 1/p2)_+")?;
            Ok(RateExponents::point(
                params.t / params.d as f64,
                0.0,
                "nonlinear-isotropic",
                true,
                vec!["t/d > (1/p1 - 1/p2)_+".into()],
            ))
        }
        RateScale::Mixed => {
            let d2 = params.p2.max(Exponent::Finite(2.0));
            let gap = (params.p1.recip() - d2.recip()).max(0.0);
            let ok = band_check(params.t - gap, "t vs (1/p1 - 1/max(p2,2))_+")?;
            require(ok, "thresholding regime needs t > (1/p1 - 1/max(p2,2))_+")?;
            Ok(RateExponents {
                alpha: params.t,
                beta_lo: params.t - params.p1.recip() + 0.5,
                beta_hi: params.t - params.p1.recip() + 0.5,
                case: "nonlinear-mixed".to_string(),
                two_sided: false,
                preconditions: vec!["t > (1/p1 - 1/max(p2,2))_+".into()],
            })
        }
    }
}

/// Outcome of a log-log rate fit.
#[derive(Clone, Debug, Serialize)]
pub struct FitResult {
    pub alpha: f64,
    pub beta: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub n_lo: u64,
    pub n_hi: u64,
    /// Condition number of the design matrix.
    pub condition: f64,
    /// Set when the condition number exceeds 1e6; the log and log-log
    /// regressors are then nearly collinear over the sampled range and the
    /// split between alpha and beta is unreliable.
    pub ill_conditioned: bool,
}

const CONDITION_WARN: f64 = 1e6;

/// Least squares for `log v = c - alpha log n + (d-1) beta log log n`.
/// The log-log column is dropped (beta = 0) when d = 1 or when the range is
/// too short for it to mean anything (max n < e^2).
pub fn fit_rate(ns: &[u64], values: &[f64], d: u32) -> Result<FitResult> {
    if d == 0 {
        return Err(invalid("dimension d must be >= 1"));
    }
    if ns.len() != values.len() {
        return Err(invalid(format!(
            "{} sample sizes but {} values",
            ns.len(),
            values.len()
        )));
    }
    if ns.len() < 4 {
        return Err(invalid("rate fitting needs at least 4 points"));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] == 0 {
        return Err(invalid("sample sizes must be strictly increasing and positive"));
    }
    if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(invalid("rate fitting needs positive finite values"));
    }

    let with_log = d > 1 && (*ns.last().unwrap() as f64) >= std::f64::consts::E.powi(2);
    if with_log && ns[0] < 2 {
        return Err(invalid("log-log fitting needs every n >= 2"));
    }
    let cols = if with_log { 3 } else { 2 };
    let rows = ns.len();
    let mut design = DMatrix::zeros(rows, cols);
    let mut rhs = DMatrix::zeros(rows, 1);
    for (i, (&n, &v)) in ns.iter().zip(values).enumerate() {
        let ln_n = (n as f64).ln();
        design[(i, 0)] = 1.0;
        design[(i, 1)] = -ln_n;
        if with_log {
            design[(i, 2)] = (d - 1) as f64 * ln_n.ln();
        }
        rhs[(i, 0)] = v.ln();
    }
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let sol = svd
        .solve(&rhs, smax * 1e-13)
        .map_err(|e| invalid(format!("degenerate least-squares system: {e}")))?;
    let alpha = sol[(1, 0)];
    let beta = if with_log { sol[(2, 0)] } else { 0.0 };
    let fitted = design * &sol;
    let residual = (fitted
        .iter()
        .zip(rhs.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / rows as f64)
        .sqrt();
    Ok(FitResult {
        alpha,
        beta,
        residual,
        n_lo: ns[0],
        n_hi: *ns.last().unwrap(),
        condition,
        ill_conditioned: condition > CONDITION_WARN,
    })
}
