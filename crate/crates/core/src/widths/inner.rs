//! Inner extremization of norm ratios over a fixed subspace, shared by the
//! Bernstein (minimum) and Gelfand (maximum) searches.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::exponent::Exponent;
use crate::optim::{deterministic_starts, gaussian_vec, pattern_probes, RatioProblem};

use super::candidates::small_combinations;

/// Directions inside the span of `basis` that annihilate n-1 ambient
/// coordinates. For ratios with an l_1-like numerator these are the kink
/// vertices where the true minimum sits, and plain descent routinely stalls
/// elsewhere; seeding from them makes the inner minimum reliable.
fn vertex_starts(basis: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let m = basis.nrows();
    let n = basis.ncols();
    if n < 2 || n - 1 > m {
        return vec![];
    }
    let subsets = match small_combinations(m, n - 1, 256) {
        Some(all) => all,
        None => {
            let mut sampled = Vec::with_capacity(128);
            for _ in 0..128 {
                let mut pick: Vec<usize> = Vec::with_capacity(n - 1);
                while pick.len() < n - 1 {
                    let i = rng.random_range(0..m);
                    if !pick.contains(&i) {
                        pick.push(i);
                    }
                }
                pick.sort_unstable();
                sampled.push(pick);
            }
            sampled
        }
    };
    let mut out = Vec::new();
    for s in subsets {
        // Null direction of the (n-1) x n row restriction of the basis,
        // via the smallest eigenvector of its Gram matrix.
        let mut rows = DMatrix::zeros(n - 1, n);
        for (ri, &i) in s.iter().enumerate() {
            for j in 0..n {
                rows[(ri, j)] = basis[(i, j)];
            }
        }
        let gram = rows.transpose() * &rows;
        let eig = gram.symmetric_eigen();
        let mut min_idx = 0;
        for k in 1..n {
            if eig.eigenvalues[k] < eig.eigenvalues[min_idx] {
                min_idx = k;
            }
        }
        out.push(eig.eigenvectors.column(min_idx).iter().copied().collect());
    }
    out
}

pub(crate) struct InnerOutcome {
    pub value: f64,
    /// Extremal coefficient vector, normalized in the denominator norm.
    pub coeff: Vec<f64>,
    pub converged: bool,
}

/// Extremum of `||num_map c||_tgt / ||den_map c||_src` over `c != 0`.
///
/// Evaluates the sign-pattern lattice and the deterministic starts first;
/// descends (or ascends) from the handful of best starts. Lattice probes hit
/// the exact extremal vectors of structured instances, which keeps identity
/// products and sandwich checks tight instead of merely close.
pub(crate) fn subspace_ratio_extremum(
    num_map: &DMatrix<f64>,
    den_map: Option<&DMatrix<f64>>,
    tgt: Exponent,
    src: Exponent,
    maximize: bool,
    max_iter: u32,
    rng: &mut ChaCha8Rng,
) -> InnerOutcome {
    let prob = RatioProblem {
        num_map,
        den_map,
        num_norm: tgt,
        den_norm: src,
    };
    let n = prob.dim();
    let mut starts = deterministic_starts(n);
    for _ in 0..4 {
        starts.push(gaussian_vec(rng, n));
    }
    if !maximize {
        if let Some(basis) = den_map {
            starts.extend(vertex_starts(basis, rng));
        }
    }
    if n == 2 {
        // The coefficient sphere is a circle; a dense angle sweep plus local
        // polish is effectively exact and immune to kink stalls.
        for k in 0..360 {
            let t = std::f64::consts::PI * (k as f64) / 360.0;
            starts.push(vec![t.cos(), t.sin()]);
        }
    }
    let probes = pattern_probes(n, 364, rng);

    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };

    // Rank every start and probe by value.
    let mut ranked: Vec<(f64, Vec<f64>)> = Vec::with_capacity(starts.len() + probes.len());
    for s in starts.into_iter().chain(probes.into_iter()) {
        let v = prob.eval(&s);
        if v.is_finite() {
            ranked.push((v, s));
        }
    }
    if maximize {
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    } else {
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let mut best_value = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    let mut best_coeff = vec![0.0; n];
    let mut best_conv = false;
    if let Some((v, c)) = ranked.first() {
        best_value = *v;
        best_coeff = c.clone();
    }
    for (_, s) in ranked.iter().take(6) {
        let out = prob.extremize(s, maximize, max_iter);
        if better(out.value, best_value) {
            best_value = out.value;
            best_coeff = out.point;
            best_conv = out.converged;
        } else if out.converged
            && (out.value - best_value).abs() <= 1e-10 * best_value.abs().max(1e-300)
        {
            // A converged run confirming the best probe value.
            best_conv = true;
        }
    }
    InnerOutcome {
        value: best_value,
        coeff: best_coeff,
        converged: best_conv,
    }
}
