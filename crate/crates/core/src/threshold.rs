//! Level-dependent soft thresholding of coefficient fields.
//!
//! The approximant keeps every coefficient up to the budget level J, applies
//! a soft threshold with level-dependent cutoff on the levels J < mu <= K,
//! and drops everything deeper than K. The cutoff schedule `eps_mu =
//! 2^{mu a} 2^{J b} mu^{-(d-1)/p1}` with `a = -t + 1/p1 + theta`, `b = -1/p1
//! - theta` balances the retained-coefficient budget `~ 2^J J^{d-1}` against
//! the target error `~ 2^{-Jt} J^{(d-1)(1/2 - 1/p1)}`. The experiment runner
//! measures both constants empirically; nothing here assumes them.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{boundary, guard, invalid, Result};
use crate::exponent::Exponent;
use crate::hypercross::{bnorm, enumerate_block, fnorm, CoeffField};
use crate::optim::rng_for;
use crate::params::{ParamSet, BOUNDARY_GUARD};

const TAG_DECAY: u64 = 0x6465_6361;

/// `max(p2, 2)`, the integrability index governing the threshold regime.
pub fn delta2(p2: Exponent) -> Exponent {
    p2.max(Exponent::Finite(2.0))
}

/// The threshold steepness `theta = (t - 1/p1 + 1/d2) / (2 (1 - p1/d2))`
/// with `d2 = max(p2, 2)`. Positive exactly in the admissible regime.
pub fn theta(t: f64, p1: Exponent, p2: Exponent) -> Result<f64> {
    let d2 = delta2(p2);
    if p1.value() >= d2.value() {
        return Err(boundary(
            "threshold regime requires p1 < max(p2,2)",
        ));
    }
    let margin = t - (p1.recip() - d2.recip());
    if margin <= BOUNDARY_GUARD {
        return Err(boundary(format!(
            "insufficient smoothness: t = {t} must exceed 1/p1 - 1/max(p2,2) = {}",
            p1.recip() - d2.recip()
        )));
    }
    Ok(0.5 * margin / (1.0 - p1.value() / d2.value()))
}

/// Smallest cutoff level `K >= J` such that the truncation-tail bound with
/// constant 1 drops below the target error `2^{-Jt} J^{(d-1)(1/2 - 1/p1)}`.
/// The tail bound is `2^{L(-t + 1/p1 - 1/p2)}` when p1 < p2 and
/// `2^{-Lt} L^{(d-1)(1/2 - 1/p1)_+}` when p2 <= p1.
pub fn choose_k(j: u32, params: &ParamSet) -> Result<u32> {
    if j == 0 {
        return Err(invalid("budget level J must be >= 1"));
    }
    let t = params.t;
    let p1 = params.p1.recip();
    let p2 = params.p2.recip();
    let dd = (params.d - 1) as f64;
    let src_finer = params.p1.value() < params.p2.value();
    let slope = if src_finer { -t + p1 - p2 } else { -t };
    if slope >= 0.0 {
        return Err(invalid(format!(
            "truncation bound does not decay (tail exponent {slope} >= 0)"
        )));
    }
    let target = -(j as f64) * t + dd * (0.5 - p1) * (j as f64).log2();
    let tail_log2 = |l: f64| {
        if src_finer {
            l * slope
        } else {
            -l * t + dd * (0.5 - p1).max(0.0) * l.log2()
        }
    };
    let mut l = j;
    while tail_log2(l as f64) > target + 1e-9 {
        l += 1;
        if l > 64 * j + 640 {
            return Err(invalid(
                "cutoff search did not converge; exponent configuration is degenerate",
            ));
        }
    }
    Ok(l)
}

/// The shrinkage map: 0 below `eps`, the linear ramp `(2|z| - 2 eps) z/|z|`
/// up to `2 eps`, identity above. With `eps = 0` this is the identity.
pub fn soft_threshold(z: Complex64, eps: f64) -> Complex64 {
    debug_assert!(eps >= 0.0);
    let r = z.norm();
    if r <= eps {
        Complex64::new(0.0, 0.0)
    } else if r <= 2.0 * eps {
        z * ((2.0 * r - 2.0 * eps) / r)
    } else {
        z
    }
}

/// Per-level cutoffs for one (J, parameter) pair.
#[derive(Clone, Debug)]
pub struct ThresholdSchedule {
    pub j: u32,
    pub k: u32,
    pub theta: f64,
    /// Exponent of `2^mu` in the cutoff.
    pub alpha: f64,
    /// Exponent of `2^J` in the cutoff.
    pub beta: f64,
    pub delta2: Exponent,
    /// `eps[mu]` for `mu = 0..=k`; zero through level J.
    pub eps: Vec<f64>,
}

impl ThresholdSchedule {
    pub fn new(j: u32, params: &ParamSet) -> Result<ThresholdSchedule> {
        let th = theta(params.t, params.p1, params.p2)?;
        let k = choose_k(j, params)?;
        let alpha = -params.t + params.p1.recip() + th;
        let beta = -params.p1.recip() - th;
        let dd = (params.d - 1) as f64;
        let eps = (0..=k)
            .map(|mu| {
                if mu <= j {
                    0.0
                } else {
                    (mu as f64 * alpha + j as f64 * beta).exp2()
                        * (mu as f64).powf(-dd * params.p1.recip())
                }
            })
            .collect();
        Ok(ThresholdSchedule {
            j,
            k,
            theta: th,
            alpha,
            beta,
            delta2: delta2(params.p2),
            eps,
        })
    }

    fn validate(&self, j: u32) -> Result<()> {
        if self.j != j {
            return Err(invalid(format!(
                "schedule was built for J = {}, requested J = {j}",
                self.j
            )));
        }
        if self.k < self.j || self.eps.len() != self.k as usize + 1 {
            return Err(invalid("schedule cutoff table is inconsistent"));
        }
        if self.eps[..=self.j as usize].iter().any(|e| *e != 0.0) {
            return Err(invalid("schedule must not threshold levels <= J"));
        }
        if self.eps.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(invalid("schedule cutoffs must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// What the sparsifier kept and how much it cost.
#[derive(Clone, Debug)]
pub struct SparsifyStats {
    /// Retained count per level `mu = 0..=K`.
    pub retained: Vec<u64>,
    pub total_nonzeros: u64,
    /// `total_nonzeros / (2^J J^{d-1})`.
    pub c0: f64,
    /// f-scale error of the approximant against the input.
    pub error: f64,
    /// `error / (2^{-Jt} J^{(d-1)(1/2 - 1/p1)})`.
    pub c1: f64,
    /// False when the input had b-norm > 1; the budget and error guarantees
    /// are stated on the unit ball, so the constants are then unreliable.
    pub within_unit_ball: bool,
}

/// Applies the threshold schedule to `field`: levels above K are dropped,
/// levels above J are shrunk, levels up to J pass through. The map is
/// 2-Lipschitz in every coefficient for a fixed schedule.
pub fn sparsify(
    field: &CoeffField,
    j: u32,
    params: &ParamSet,
    schedule: Option<&ThresholdSchedule>,
) -> Result<(CoeffField, SparsifyStats)> {
    let built;
    let sched = match schedule {
        Some(s) => {
            s.validate(j)?;
            s
        }
        None => {
            built = ThresholdSchedule::new(j, params)?;
            &built
        }
    };
    let within_unit_ball = bnorm(field, params.t, params.p1, params.p1) <= 1.0 + 1e-9;

    let mut kept = CoeffField::new(field.dim())?;
    let mut retained = vec![0u64; sched.k as usize + 1];
    for (idx, v) in field.iter() {
        let mu = idx.total_level();
        if mu > sched.k {
            continue;
        }
        let w = soft_threshold(*v, sched.eps[mu as usize]);
        if w != Complex64::new(0.0, 0.0) {
            kept.insert(idx.clone(), w)?;
            retained[mu as usize] += 1;
        }
    }
    let total_nonzeros: u64 = retained.iter().sum();
    let error = approx_error(field, &kept, params)?;
    let jf = j as f64;
    let dd = (params.d - 1) as f64;
    let c0 = total_nonzeros as f64 / (jf.exp2() * jf.powf(dd));
    let c1 = error / ((-jf * params.t).exp2() * jf.powf(dd * (0.5 - params.p1.recip())));
    Ok((
        kept,
        SparsifyStats {
            retained,
            total_nonzeros,
            c0,
            error,
            c1,
            within_unit_ball,
        },
    ))
}

/// f-scale distance `fnorm(a - b, 0, p2, 2)` between a field and its
/// approximant.
pub fn approx_error(a: &CoeffField, b: &CoeffField, params: &ParamSet) -> Result<f64> {
    let diff = a.sub(b)?;
    fnorm(&diff, 0.0, params.p2, Exponent::Finite(2.0))
}

/// Families of unit-ball test fields for the decay experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayGenerator {
    /// Gaussian coefficients on every index with level <= min(K, J+3),
    /// normalized to unit b-norm. The depth margin past J keeps the family
    /// sensitive to the thresholded levels without materializing the far
    /// tail, whose contribution decays strictly faster.
    RandomDense,
    /// Equal-modulus mass spread over the whole block J+1, the family that
    /// saturates the error bound.
    BlockConcentrated,
    /// Equal-modulus mass on the single most balanced level of total J+1.
    SingleLevelFlat,
}

impl DecayGenerator {
    pub fn name(&self) -> &'static str {
        match self {
            DecayGenerator::RandomDense => "random-dense",
            DecayGenerator::BlockConcentrated => "block-concentrated",
            DecayGenerator::SingleLevelFlat => "single-level-flat",
        }
    }
}

impl std::str::FromStr for DecayGenerator {
    type Err = crate::error::CoreError;

    fn from_str(s: &str) -> Result<DecayGenerator> {
        match s {
            "random-dense" => Ok(DecayGenerator::RandomDense),
            "block-concentrated" => Ok(DecayGenerator::BlockConcentrated),
            "single-level-flat" => Ok(DecayGenerator::SingleLevelFlat),
            other => Err(invalid(format!(
                "unknown generator {other:?}; expected random-dense, \
                 block-concentrated or single-level-flat"
            ))),
        }
    }
}

/// Extra support depth of the random-dense family past the budget level.
const DENSE_TAIL: u32 = 3;

/// Largest block the decay experiment will materialize per trial.
const DECAY_DMU_CAP: u64 = 1 << 21;

fn generate_field(
    gen: DecayGenerator,
    params: &ParamSet,
    j: u32,
    k: u32,
    master_seed: u64,
    trial: u32,
) -> Result<CoeffField> {
    let d = params.d;
    let mut field = CoeffField::new(d as usize)?;
    match gen {
        DecayGenerator::RandomDense => {
            let mut rng = rng_for(master_seed, TAG_DECAY.wrapping_add(j as u64), trial as u64);
            let top = k.min(j + DENSE_TAIL);
            for mu in 0..=top {
                for idx in enumerate_block(mu, d)?.indices() {
                    let v: f64 = rng.sample(StandardNormal);
                    field.insert(idx, Complex64::new(v, 0.0))?;
                }
            }
        }
        DecayGenerator::BlockConcentrated => {
            for idx in enumerate_block(j + 1, d)?.indices() {
                field.insert(idx, Complex64::new(1.0, 0.0))?;
            }
        }
        DecayGenerator::SingleLevelFlat => {
            let mu = j + 1;
            let base = mu / d;
            let mut level = vec![base; d as usize];
            for ax in 0..(mu % d) as usize {
                level[ax] += 1;
            }
            let layout = enumerate_block(mu, d)?;
            for idx in layout.indices() {
                if idx.level() == level.as_slice() {
                    field.insert(idx, Complex64::new(1.0, 0.0))?;
                }
            }
        }
    }
    let norm = bnorm(&field, params.t, params.p1, params.p1);
    if norm <= 0.0 {
        return Err(invalid("generated field collapsed to zero"));
    }
    Ok(field.scale(1.0 / norm))
}

/// One row of the decay table: worst case over the trials at a fixed J.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow {
    pub j: u32,
    pub k: u32,
    pub trials: u32,
    pub max_error: f64,
    pub max_nonzeros: u64,
    pub c0: f64,
    pub c1: f64,
}

/// Runs the sparsifier over `trials` unit-ball fields per budget level and
/// records worst-case error and sparsity. Trials are seeded by
/// (seed, J, trial) and run in parallel; the output does not depend on the
/// thread schedule.
pub fn run_decay_experiment(
    params: &ParamSet,
    j_lo: u32,
    j_hi: u32,
    trials: u32,
    seed: u64,
    gen: DecayGenerator,
) -> Result<Vec<DecayRow>> {
    if j_lo == 0 || j_lo > j_hi {
        return Err(invalid(format!(
            "budget range [{j_lo}, {j_hi}] must satisfy 1 <= jmin <= jmax"
        )));
    }
    if trials == 0 {
        return Err(invalid("trials must be >= 1"));
    }
    // Fail fast on budgets whose fields would not fit on a desk.
    let deepest = match gen {
        DecayGenerator::RandomDense => choose_k(j_hi, params)?.min(j_hi + DENSE_TAIL),
        DecayGenerator::BlockConcentrated | DecayGenerator::SingleLevelFlat => j_hi + 1,
    };
    let top_block = enumerate_block(deepest, params.d)?;
    if top_block.d_mu > DECAY_DMU_CAP {
        return Err(guard(format!(
            "block too large: jmax = {j_hi} reaches level {deepest} with D_mu = {} indices, \
             cap is {DECAY_DMU_CAP}",
            top_block.d_mu
        )));
    }
    let mut rows = Vec::with_capacity((j_hi - j_lo + 1) as usize);
    for j in j_lo..=j_hi {
        let sched = ThresholdSchedule::new(j, params)?;
        let per_trial: Vec<(f64, u64)> = (0..trials)
            .into_par_iter()
            .map(|trial| -> Result<(f64, u64)> {
                let field = generate_field(gen, params, j, sched.k, seed, trial)?;
                let (_, stats) = sparsify(&field, j, params, Some(&sched))?;
                Ok((stats.error, stats.total_nonzeros))
            })
            .collect::<Result<Vec<_>>>()?;
        let max_error = per_trial.iter().fold(0.0_f64, |a, r| a.max(r.0));
        let max_nonzeros = per_trial.iter().map(|r| r.1).max().unwrap_or(0);
        let jf = j as f64;
        let dd = (params.d - 1) as f64;
        rows.push(DecayRow {
            j,
            k: sched.k,
            trials,
            max_error,
            max_nonzeros,
            c0: max_nonzeros as f64 / (jf.exp2() * jf.powf(dd)),
            c1: max_error / ((-jf * params.t).exp2() * jf.powf(dd * (0.5 - params.p1.recip()))),
        });
    }
    Ok(rows)
}
