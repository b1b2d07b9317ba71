//! Operator norms of matrices acting between finite-dimensional p-spaces.
//!
//! Three source/target combinations admit closed forms and are reported as
//! certified values: a source space with `p = 1` (maximal column norm), a sup
//! norm target (maximal dual row norm), and the Euclidean-to-Euclidean case
//! (largest singular value). Everything else falls back to seeded multistart
//! ascent of the norm ratio, which only certifies a lower bound.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exponent::Exponent;
use crate::optim::{
    deterministic_starts, dot, gaussian_vec, pattern_probes, rng_for, RatioProblem,
};
use crate::pnorm::{holder_witness, pnorm};

/// Search effort knobs shared by the iterative estimators.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimBudget {
    /// Random restarts per search, on top of the deterministic starts.
    pub restarts: u32,
    /// Iteration cap per ascent/descent run.
    pub max_iter: u32,
    /// Master seed; every derived stream mixes it with a role tag.
    pub seed: u64,
}

impl Default for OptimBudget {
    fn default() -> Self {
        OptimBudget {
            restarts: 256,
            max_iter: 500,
            seed: 0,
        }
    }
}

impl OptimBudget {
    pub fn with_seed(seed: u64) -> Self {
        OptimBudget {
            seed,
            ..OptimBudget::default()
        }
    }

    /// A cheaper budget for inner loops nested inside another search.
    pub(crate) fn inner(&self) -> Self {
        OptimBudget {
            restarts: (self.restarts / 8).max(8),
            max_iter: self.max_iter,
            seed: self.seed,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(invalid("empty optimization budget: restarts must be >= 1"));
        }
        if self.max_iter == 0 {
            return Err(invalid("empty optimization budget: max_iter must be >= 1"));
        }
        Ok(())
    }
}

/// Outcome of a norm computation.
#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    /// True when the value comes from a closed form rather than a search.
    pub certified: bool,
    /// A unit vector (in the source norm) attaining `value`, when available.
    pub witness: Option<Vec<f64>>,
    pub converged: bool,
}

/// `||M||` as a map from `l_src^n` to `l_tgt^m`.
pub fn operator_norm(
    m: &DMatrix<f64>,
    src: Exponent,
    tgt: Exponent,
    budget: &OptimBudget,
) -> Result<NormEstimate> {
    budget.validate()?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(NormEstimate {
            value: 0.0,
            certified: true,
            witness: None,
            converged: true,
        });
    }

    // Source l_1: the norm is the largest target norm of a column.
    if src == Exponent::Finite(1.0) {
        let (j, value) = (0..m.ncols())
            .map(|j| {
                let col: Vec<f64> = m.column(j).iter().copied().collect();
                pnorm(&col, tgt)
            })
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let mut w = vec![0.0; m.ncols()];
        w[j] = 1.0;
        return Ok(NormEstimate {
            value,
            certified: true,
            witness: Some(w),
            converged: true,
        });
    }

    // Target sup norm: the norm is the largest dual norm of a row, and the
    // Hoelder witness of the best row attains it.
    if tgt == Exponent::Infinity {
        let (i, value) = (0..m.nrows())
            .map(|i| {
                let row: Vec<f64> = m.row(i).iter().copied().collect();
                pnorm(&row, src.dual())
            })
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        let witness = holder_witness(&row, src);
        return Ok(NormEstimate {
            value,
            certified: true,
            witness,
            converged: true,
        });
    }

    // Euclidean on both sides: largest singular value.
    if src == Exponent::Finite(2.0) && tgt == Exponent::Finite(2.0) {
        let svd = m.clone().svd(false, true);
        let mut pairs: Vec<(f64, usize)> = svd
            .singular_values
            .iter()
            .copied()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (value, idx) = pairs[0];
        let witness = svd
            .v_t
            .as_ref()
            .map(|vt| vt.row(idx).iter().copied().collect());
        return Ok(NormEstimate {
            value,
            certified: true,
            witness,
            converged: true,
        });
    }

    // General case: multistart ascent of ||Mx||_tgt / ||x||_src.
    let prob = RatioProblem {
        num_map: m,
        den_map: None,
        num_norm: tgt,
        den_norm: src,
    };
    let n = m.ncols();
    let mut rng = rng_for(budget.seed, 0x6f70_6e6f, 0);
    let mut starts = deterministic_starts(n);
    // Hoelder witnesses of the rows are exact maximizers when a single row
    // dominates, and strong starts otherwise.
    for i in 0..m.nrows() {
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        if let Some(w) = holder_witness(&row, src) {
            starts.push(w);
        }
    }
    for _ in 0..budget.restarts {
        starts.push(gaussian_vec(&mut rng, n));
    }
    let probes = pattern_probes(n, 512, &mut rng);

    let mut best_value = f64::NEG_INFINITY;
    let mut best_point: Option<Vec<f64>> = None;
    let mut best_conv = false;
    for probe in &probes {
        let v = prob.eval(probe);
        if v > best_value {
            best_value = v;
            let nr = pnorm(probe, src);
            best_point = Some(probe.iter().map(|x| x / nr).collect());
            best_conv = false;
        }
    }
    for s in &starts {
        let out = prob.extremize(s, true, budget.max_iter);
        if out.value > best_value {
            best_value = out.value;
            best_point = Some(out.point);
            best_conv = out.converged;
        }
    }
    // Polish the best probe in case it beat every ascent run.
    if let Some(ref p) = best_point {
        let out = prob.extremize(p, true, budget.max_iter);
        if out.value > best_value {
            best_value = out.value;
            best_point = Some(out.point);
            best_conv = out.converged;
        }
    }
    Ok(NormEstimate {
        value: best_value.max(0.0),
        certified: false,
        witness: best_point,
        converged: best_conv,
    })
}

/// Exact norm of the identity from `l_p1^m` to `l_p2^m`: 1 for `p1 <= p2`,
/// otherwise `m^(1/p2 - 1/p1)`.
pub fn identity_norm(m: usize, p1: Exponent, p2: Exponent) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let gap = p2.recip() - p1.recip();
    if gap <= 0.0 {
        1.0
    } else {
        (m as f64).powf(gap)
    }
}

/// Largest inner product with a unit vector of the source ball, i.e. the dual
/// norm of `a`; used for certified row bounds.
pub fn dual_pairing(a: &[f64], src: Exponent) -> f64 {
    match holder_witness(a, src) {
        Some(w) => dot(a, &w).abs(),
        None => 0.0,
    }
}
