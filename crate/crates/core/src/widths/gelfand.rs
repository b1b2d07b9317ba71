//! Gelfand number search: the infimum of the restricted operator norm over
//! sampled codimension-(n-1) subspaces, each given as the kernel of n-1
//! constraint functionals. Reported as an upper bound.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::Result;
use crate::opnorm::OptimBudget;
use crate::optim::{mat_vec, mix_seed, rng_for};

use super::candidates::{constraint_rows, kernel_basis, polish_basis};
use super::inner::subspace_ratio_extremum;
use super::{FiniteOperator, SearchOutcome};

const TAG: u64 = 0x6765_6c66;

fn restricted_norm(
    op: &FiniteOperator,
    constraints: &DMatrix<f64>,
    budget: &OptimBudget,
) -> Option<(f64, Vec<f64>, bool)> {
    let kernel = kernel_basis(constraints)?;
    let mut rng = rng_for(mix_seed(budget.seed, TAG, 0x706f_6c69), 1, 0);
    let image = &op.matrix * &kernel;
    let out = subspace_ratio_extremum(
        &image,
        Some(&kernel),
        op.tgt,
        op.src,
        true,
        budget.max_iter,
        &mut rng,
    );
    Some((out.value, mat_vec(&kernel, &out.coeff), out.converged))
}

pub(crate) fn search(op: &FiniteOperator, n: usize, budget: &OptimBudget) -> Result<SearchOutcome> {
    let cands = constraint_rows(op, n - 1, budget, TAG);
    let results: Vec<(f64, usize, Vec<f64>, bool, &'static str)> = cands
        .par_iter()
        .enumerate()
        .filter_map(|(idx, cand)| {
            let kernel = kernel_basis(&cand.basis)?;
            let mut rng = rng_for(mix_seed(budget.seed, TAG, idx as u64), 1, 0);
            let image = &op.matrix * &kernel;
            let out = subspace_ratio_extremum(
                &image,
                Some(&kernel),
                op.tgt,
                op.src,
                true,
                budget.max_iter,
                &mut rng,
            );
            let witness = mat_vec(&kernel, &out.coeff);
            Some((out.value, idx, witness, out.converged, cand.family))
        })
        .collect();

    let mut best: Option<(f64, usize, Vec<f64>, bool, &'static str)> = None;
    for r in results {
        let take = match &best {
            None => true,
            Some(b) => r.0 < b.0,
        };
        if take {
            best = Some(r);
        }
    }
    match best {
        Some((value, idx, witness, converged, family)) => {
            // Climb locally from the winning constraint set, but only where
            // the restricted norm is computed essentially exactly (kernels of
            // dimension <= 2 get a full angle sweep); an ascent-based inner
            // estimate would let perturbations win by missing the maximum.
            let kernel_dim = op.cols() - (n - 1);
            let (value, witness, converged, family) = if kernel_dim <= 2 {
                let mut polish_rng = rng_for(mix_seed(budget.seed, TAG, 0xf1a5), 2, 0);
                let (constraints, _, improved) = polish_basis(
                    &cands[idx].basis,
                    value,
                    false,
                    &mut polish_rng,
                    24,
                    |c| restricted_norm(op, c, budget).map_or(f64::INFINITY, |r| r.0),
                );
                if improved {
                    match restricted_norm(op, &constraints, budget) {
                        Some((v, w, conv)) => (v, w, conv, "polished"),
                        None => (value, witness, converged, family),
                    }
                } else {
                    (value, witness, converged, family)
                }
            } else {
                (value, witness, converged, family)
            };
            Ok(SearchOutcome {
                value: value.max(0.0),
                witness: Some(witness),
                converged,
                family: family.to_string(),
            })
        }
        None => {
            // No usable constraint set (n - 1 >= m): the whole space is the
            // only admissible subspace and the value is the operator norm.
            let est = crate::opnorm::operator_norm(&op.matrix, op.src, op.tgt, budget)?;
            Ok(SearchOutcome {
                value: est.value,
                witness: est.witness,
                converged: est.converged,
                family: "operator-norm".to_string(),
            })
        }
    }
}
