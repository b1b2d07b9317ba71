//! Empirical block embedding norms.
//!
//! For a block of levels with `|nu|_1 = mu` the norm of the embedding from
//! the smoothness-`t` b-scale (exponent p1) into the flat f-scale (exponent
//! p2, inner index 2) decays like `2^{mu(-t + (1/p1 - 1/p2)_+)}` times a
//! `mu^{(d-1)(1/2 - 1/p1)_+}` factor. The probe measures the norm from below
//! by maximizing the ratio over structured and random fields on the block,
//! and reports the predicted dyadic exponent for downstream rate fits.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{guard, invalid, Result};
use crate::exponent::Exponent;
use crate::opnorm::OptimBudget;
use crate::optim::rng_for;
use crate::params::{ParamSet, BOUNDARY_GUARD};

use super::{bnorm, enumerate_block, fnorm, CoeffField};

const TAG: u64 = 0x626c_6f63;

/// Largest block dimension the probe will materialize fields on.
const PROBE_DMU_CAP: u64 = 1 << 21;

/// Outcome of one block probe.
#[derive(Clone, Debug)]
pub struct BlockProbe {
    pub mu: u32,
    /// Largest ratio fnorm(la, 0, p2, 2) / bnorm(la, t, p1, p1) found.
    pub measured: f64,
    /// Predicted exponent of `measured` in `2^mu`: `-t + (1/p1 - 1/p2)_+`.
    pub predicted_exponent: f64,
    /// Which witness family attained the maximum.
    pub family: &'static str,
}

/// Estimates the embedding norm on block `mu` for `params`.
///
/// Requires `t >= (1/p1 - 1/p2)_+` so the family of probes stays bounded in
/// `mu`. Witnesses: a single atom (its ratio has a closed form and already
/// attains the predicted exponent), the constant field on the block, the
/// constant field on each single level, and seeded Gaussian fields.
pub fn block_embedding_norm_probe(
    mu: u32,
    params: &ParamSet,
    budget: &OptimBudget,
) -> Result<BlockProbe> {
    budget.validate()?;
    if params.mixed_margin() < -BOUNDARY_GUARD {
        return Err(invalid(
            "block probe needs a bounded embedding: t >= (1/p1 - 1/p2)_+",
        ));
    }
    if params.p2.is_infinite() {
        return Err(invalid("f-scale requires p < \u{221e}"));
    }
    let layout = enumerate_block(mu, params.d)?;
    if layout.d_mu > PROBE_DMU_CAP {
        return Err(guard(format!(
            "block too large: probe materializes D_mu = {} coefficients",
            layout.d_mu
        )));
    }

    let d = params.d as usize;
    let mut best = f64::NEG_INFINITY;
    let mut best_family = "none";
    let mut consider = |field: &CoeffField, family: &'static str| -> Result<()> {
        let den = bnorm(field, params.t, params.p1, params.p1);
        if den <= 0.0 {
            return Ok(());
        }
        let num = fnorm(field, 0.0, params.p2, Exponent::Finite(2.0))?;
        let ratio = num / den;
        if ratio > best {
            best = ratio;
            best_family = family;
        }
        Ok(())
    };

    let mut atom = CoeffField::new(d)?;
    atom.insert(
        layout.indices().next().expect("block is never empty"),
        Complex64::new(1.0, 0.0),
    )?;
    consider(&atom, "atom")?;

    let mut constant = CoeffField::new(d)?;
    for idx in layout.indices() {
        constant.insert(idx, Complex64::new(1.0, 0.0))?;
    }
    consider(&constant, "block-constant")?;

    for level in &layout.levels {
        let mut f = CoeffField::new(d)?;
        for idx in layout.indices() {
            if idx.level() == level.as_slice() {
                f.insert(idx, Complex64::new(1.0, 0.0))?;
            }
        }
        consider(&f, "level-constant")?;
    }

    let trials = (budget.restarts / 16).max(8);
    for trial in 0..trials {
        let mut rng = rng_for(budget.seed, TAG.wrapping_add(mu as u64), trial as u64);
        let mut f = CoeffField::new(d)?;
        for idx in layout.indices() {
            let v: f64 = rng.sample(StandardNormal);
            f.insert(idx, Complex64::new(v, 0.0))?;
        }
        consider(&f, "random")?;
    }

    Ok(BlockProbe {
        mu,
        measured: best,
        predicted_exponent: -params.t + params.recip_gap_plus(),
        family: best_family,
    })
}
