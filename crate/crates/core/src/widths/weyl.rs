//! Weyl number search: the supremum of approximation numbers of `T A` over
//! contractions `A: l_2 -> l_src`, sampled over certified-contractive
//! candidates. With a Euclidean target the inner approximation number is a
//! singular value and the result is a certified lower bound; otherwise the
//! inner value is itself an upper estimate and the result is heuristic.

use rayon::prelude::*;

use crate::error::Result;
use crate::exponent::Exponent;
use crate::opnorm::OptimBudget;
use crate::optim::mix_seed;

use super::candidates::contractions;
use super::{approx, FiniteOperator, SearchOutcome};

const TAG: u64 = 0x7765_796c;

pub(crate) fn search(op: &FiniteOperator, n: usize, budget: &OptimBudget) -> Result<SearchOutcome> {
    let hilbert_tgt = op.tgt == Exponent::Finite(2.0);
    let mut cands = contractions(op, budget, TAG);
    if !hilbert_tgt {
        // Each candidate triggers a full approximation search; keep the
        // structured ones plus a few random.
        cands.truncate(6);
    }
    let results: Vec<Result<(f64, bool, &'static str)>> = cands
        .par_iter()
        .enumerate()
        .map(|(idx, cand)| {
            let ta = &op.matrix * &cand.basis;
            if hilbert_tgt {
                let mut sv: Vec<f64> = ta.svd(false, false).singular_values.iter().copied().collect();
                sv.sort_by(|a, b| b.total_cmp(a));
                let value = sv.get(n - 1).copied().unwrap_or(0.0);
                Ok((value, true, cand.family))
            } else {
                let inner_op = FiniteOperator {
                    matrix: ta,
                    src: Exponent::Finite(2.0),
                    tgt: op.tgt,
                };
                let inner_budget = OptimBudget {
                    seed: mix_seed(budget.seed, TAG, idx as u64),
                    ..budget.inner()
                };
                let rank = inner_op.rank();
                if n > rank {
                    return Ok((0.0, true, cand.family));
                }
                let out = approx::search(&inner_op, n, &inner_budget)?;
                Ok((out.value, out.converged, cand.family))
            }
        })
        .collect();

    let mut best: Option<(f64, bool, &'static str)> = None;
    for r in results {
        let r = r?;
        let take = match &best {
            None => true,
            Some(b) => r.0 > b.0,
        };
        if take {
            best = Some(r);
        }
    }
    let (value, converged, family) = best.unwrap_or((0.0, true, "degenerate"));
    Ok(SearchOutcome {
        value: value.max(0.0),
        witness: None,
        converged,
        family: family.to_string(),
    })
}
