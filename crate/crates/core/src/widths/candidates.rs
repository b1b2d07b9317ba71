//! Candidate generation shared by the width searches.
//!
//! Random search alone misses the extremal lattice-like subspaces that
//! realize the known lower bounds on p-norm embeddings, so every family
//! mixes deterministic structured candidates (coordinate subspaces, balanced
//! partitions, paired differences, constant vectors, singular vectors) with
//! seeded Gaussian fill. All returned bases have orthonormal columns.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;

use crate::exponent::Exponent;
use crate::opnorm::OptimBudget;
use crate::optim::{gaussian_matrix, orthonormalize, rng_for};
use crate::pnorm::pnorm;

use super::FiniteOperator;

pub(crate) struct Candidate {
    pub family: &'static str,
    pub basis: DMatrix<f64>,
}

fn push(out: &mut Vec<Candidate>, family: &'static str, m: DMatrix<f64>) {
    if let Some(q) = orthonormalize(&m) {
        out.push(Candidate { family, basis: q });
    }
}

fn coordinate_basis(m: usize, idx: &[usize]) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(m, idx.len());
    for (j, &i) in idx.iter().enumerate() {
        b[(i, j)] = 1.0;
    }
    b
}

/// All n-subsets of 0..m in lexicographic order, if there are at most `cap`.
pub(crate) fn small_combinations(m: usize, n: usize, cap: usize) -> Option<Vec<Vec<usize>>> {
    let mut count: usize = 1;
    for k in 0..n {
        count = count.checked_mul(m - k)? / (k + 1);
        if count > cap * 8 {
            return None;
        }
    }
    if count > cap {
        return None;
    }
    let mut out = Vec::with_capacity(count);
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        out.push(idx.clone());
        // Advance to the next combination.
        let mut k = n;
        loop {
            if k == 0 {
                return Some(out);
            }
            k -= 1;
            if idx[k] < m - (n - k) {
                idx[k] += 1;
                for j in k + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Balanced partitions of 0..m into n nonempty groups: contiguous blocks and
/// a strided variant.
fn partitions(m: usize, n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 || n > m {
        return vec![];
    }
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..m {
        blocks[(i * n) / m].push(i);
    }
    let mut strided: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..m {
        strided[i % n].push(i);
    }
    if blocks == strided {
        vec![blocks]
    } else {
        vec![blocks, strided]
    }
}

fn indicator_basis(m: usize, groups: &[Vec<usize>], signed: bool) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(m, groups.len());
    for (j, g) in groups.iter().enumerate() {
        for (pos, &i) in g.iter().enumerate() {
            b[(i, j)] = if signed && pos % 2 == 1 { -1.0 } else { 1.0 };
        }
    }
    b
}

/// Sampled trigonometric subspaces: the constant-plus-harmonics stack, a
/// DCT-style shifted stack, and (for planes) the half-spaced phase frame
/// whose rows sit at angles i*pi/m. These realize the classic extremal
/// subspaces that neither coordinate patterns nor random draws find.
fn trigonometric_bases(m: usize, n: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::new();
    if n == 0 || n > m {
        return out;
    }
    if n == 2 && m >= 3 {
        let mut b = DMatrix::zeros(m, 2);
        for i in 0..m {
            let th = std::f64::consts::PI * (i as f64) / (m as f64);
            b[(i, 0)] = th.cos();
            b[(i, 1)] = th.sin();
        }
        out.push(b);
    }
    let mut fourier = DMatrix::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            let x = (i as f64) / (m as f64);
            fourier[(i, j)] = if j == 0 {
                1.0
            } else {
                let k = ((j + 1) / 2) as f64;
                let th = 2.0 * std::f64::consts::PI * k * x;
                if j % 2 == 1 {
                    th.cos()
                } else {
                    th.sin()
                }
            };
        }
    }
    out.push(fourier);
    let mut shifted = DMatrix::zeros(m, n);
    for j in 0..n {
        let k = (j + 1) as f64;
        for i in 0..m {
            let th = std::f64::consts::PI * (2.0 * i as f64 + 1.0) * k / (2.0 * m as f64);
            shifted[(i, j)] = th.cos();
        }
    }
    out.push(shifted);
    out
}

fn singular_windows(op: &FiniteOperator, n: usize, left: bool) -> Vec<DMatrix<f64>> {
    let svd = op.matrix.clone().svd(true, true);
    let mut order: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let dim = if left { op.rows() } else { op.cols() };
    let avail = order.len();
    if n > avail {
        return vec![];
    }
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&(_, i)| {
            if left {
                svd.u.as_ref().expect("u").column(i).iter().copied().collect()
            } else {
                svd.v_t.as_ref().expect("v_t").row(i).iter().copied().collect()
            }
        })
        .collect();
    let mut out = Vec::new();
    let starts: Vec<usize> = if avail == n {
        vec![0]
    } else {
        vec![0, 1, avail - n]
    };
    for s in starts {
        if s + n > avail {
            continue;
        }
        let mut b = DMatrix::zeros(dim, n);
        for j in 0..n {
            for i in 0..dim {
                b[(i, j)] = vectors[s + j][i];
            }
        }
        out.push(b);
    }
    out
}

/// Candidate n-dimensional subspaces of the source space.
pub(crate) fn source_bases(
    op: &FiniteOperator,
    n: usize,
    budget: &OptimBudget,
    tag: u64,
) -> Vec<Candidate> {
    let m = op.cols();
    let mut rng = rng_for(budget.seed, tag, 0);
    let mut out = Vec::new();

    match small_combinations(m, n, 128) {
        Some(combos) => {
            for c in combos {
                push(&mut out, "coordinate", coordinate_basis(m, &c));
            }
        }
        None => {
            // Greedy by image norm, plus seeded random subsets.
            let mut by_norm: Vec<(f64, usize)> = (0..m)
                .map(|j| {
                    let col: Vec<f64> = op.matrix.column(j).iter().copied().collect();
                    (pnorm(&col, op.tgt), j)
                })
                .collect();
            by_norm.sort_by(|a, b| b.0.total_cmp(&a.0));
            let top: Vec<usize> = by_norm.iter().take(n).map(|p| p.1).collect();
            push(&mut out, "coordinate", coordinate_basis(m, &top));
            let bottom: Vec<usize> = by_norm.iter().rev().take(n).map(|p| p.1).collect();
            push(&mut out, "coordinate", coordinate_basis(m, &bottom));
            for _ in 0..48 {
                let pick: Vec<usize> = sample(&mut rng, m, n).iter().collect();
                push(&mut out, "coordinate", coordinate_basis(m, &pick));
            }
        }
    }

    for groups in partitions(m, n) {
        push(&mut out, "partition", indicator_basis(m, &groups, false));
        push(&mut out, "partition-signed", indicator_basis(m, &groups, true));
    }

    if 2 * n <= m {
        // Disjoint paired differences and sums.
        let mut diff = DMatrix::zeros(m, n);
        let mut sum = DMatrix::zeros(m, n);
        for j in 0..n {
            diff[(2 * j, j)] = 1.0;
            diff[(2 * j + 1, j)] = -1.0;
            sum[(2 * j, j)] = 1.0;
            sum[(2 * j + 1, j)] = 1.0;
        }
        push(&mut out, "paired-difference", diff);
        push(&mut out, "paired-sum", sum);
    }

    if n >= 2 {
        let mut b = DMatrix::zeros(m, n);
        for i in 0..m {
            b[(i, 0)] = 1.0;
        }
        for j in 1..n {
            b[(j - 1, j)] = 1.0;
        }
        push(&mut out, "constant-augmented", b);
    }

    for w in singular_windows(op, n, false) {
        push(&mut out, "singular", w);
    }

    for t in trigonometric_bases(m, n) {
        push(&mut out, "trigonometric", t);
    }

    let deterministic = out.len();
    let want = (budget.restarts as usize).max(deterministic + 8);
    while out.len() < want {
        let g = gaussian_matrix(&mut rng, m, n);
        push(&mut out, "random", g);
        if out.len() == deterministic {
            break; // Degenerate dimensions; avoid looping forever.
        }
    }
    out
}

/// Candidate k-dimensional subspaces of the target space (Kolmogorov's N).
pub(crate) fn target_bases(
    op: &FiniteOperator,
    k: usize,
    budget: &OptimBudget,
    tag: u64,
) -> Vec<Candidate> {
    let m = op.rows();
    let mut rng = rng_for(budget.seed, tag, 1);
    let mut out = Vec::new();
    if k == 0 || k >= m {
        return out;
    }

    for w in singular_windows(op, k, true) {
        push(&mut out, "singular", w);
    }

    match small_combinations(m, k, 128) {
        Some(combos) => {
            for c in combos {
                push(&mut out, "coordinate", coordinate_basis(m, &c));
            }
        }
        None => {
            let mut by_norm: Vec<(f64, usize)> = (0..m)
                .map(|i| {
                    let row: Vec<f64> = op.matrix.row(i).iter().copied().collect();
                    (pnorm(&row, op.src.dual()), i)
                })
                .collect();
            by_norm.sort_by(|a, b| b.0.total_cmp(&a.0));
            let top: Vec<usize> = by_norm.iter().take(k).map(|p| p.1).collect();
            push(&mut out, "coordinate", coordinate_basis(m, &top));
            for _ in 0..48 {
                let pick: Vec<usize> = sample(&mut rng, m, k).iter().collect();
                push(&mut out, "coordinate", coordinate_basis(m, &pick));
            }
        }
    }

    for groups in partitions(m, k) {
        push(&mut out, "partition", indicator_basis(m, &groups, false));
        push(&mut out, "partition-signed", indicator_basis(m, &groups, true));
    }

    for t in trigonometric_bases(m, k) {
        push(&mut out, "trigonometric", t);
    }

    // Images of structured source subspaces.
    for src_cand in source_bases(op, k.min(op.cols()), &OptimBudget { restarts: 1, ..*budget }, tag ^ 0x5a5a)
    {
        if src_cand.basis.ncols() == k {
            push(&mut out, "image", &op.matrix * &src_cand.basis);
        }
    }

    let deterministic = out.len();
    let want = (budget.restarts as usize).max(deterministic + 8);
    while out.len() < want {
        let g = gaussian_matrix(&mut rng, m, k);
        push(&mut out, "random", g);
        if out.len() == deterministic {
            break;
        }
    }
    out
}

/// Candidate constraint matrices (k rows, each row one functional) whose
/// kernels are the codimension-k source subspaces for the Gelfand search.
pub(crate) fn constraint_rows(
    op: &FiniteOperator,
    k: usize,
    budget: &OptimBudget,
    tag: u64,
) -> Vec<Candidate> {
    let m = op.cols();
    let mut rng = rng_for(budget.seed, tag, 2);
    let mut out = Vec::new();
    if k == 0 || k >= m {
        return out;
    }

    for w in singular_windows(op, k, false) {
        push(&mut out, "singular", w);
    }

    match small_combinations(m, k, 128) {
        Some(combos) => {
            for c in combos {
                push(&mut out, "coordinate", coordinate_basis(m, &c));
            }
        }
        None => {
            for _ in 0..48 {
                let pick: Vec<usize> = sample(&mut rng, m, k).iter().collect();
                push(&mut out, "coordinate", coordinate_basis(m, &pick));
            }
        }
    }

    // Group-sum functionals: the kernel forces zero sum over each group.
    for groups in partitions(m, k) {
        push(&mut out, "group-sum", indicator_basis(m, &groups, false));
        push(&mut out, "group-sum-signed", indicator_basis(m, &groups, true));
    }

    // Kernels of trigonometric functionals are the complementary
    // trigonometric subspaces.
    for t in trigonometric_bases(m, k) {
        push(&mut out, "trigonometric", t);
    }

    let deterministic = out.len();
    let want = (budget.restarts as usize).max(deterministic + 8);
    while out.len() < want {
        let g = gaussian_matrix(&mut rng, m, k);
        push(&mut out, "random", g);
        if out.len() == deterministic {
            break;
        }
    }
    out
}

/// Orthonormal basis of the kernel of the k×m constraint matrix (given here
/// by its transposed, column form after orthonormalization).
pub(crate) fn kernel_basis(constraints: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    // `constraints` has orthonormal columns spanning the functional space;
    // the kernel is its orthogonal complement. The complement projector
    // I - C C^t is idempotent, so its eigenvalues split into exact ones and
    // zeros and the unit eigenvectors form the sought orthonormal basis.
    let m = constraints.nrows();
    let k = constraints.ncols();
    if k >= m {
        return None;
    }
    let proj = DMatrix::<f64>::identity(m, m) - constraints * constraints.transpose();
    let eig = proj.symmetric_eigen();
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let keep = &idx[..m - k];
    if keep.iter().any(|&j| eig.eigenvalues[j] < 0.5) {
        return None; // Constraint columns were not independent.
    }
    let mut out = DMatrix::zeros(m, m - k);
    for (jj, &j) in keep.iter().enumerate() {
        for i in 0..m {
            out[(i, jj)] = eig.eigenvectors.column(j)[i];
        }
    }
    Some(out)
}

/// Hill-climb on the Stiefel manifold around a winning basis: perturb with
/// shrinking Gaussian noise, re-orthonormalize, keep strict improvements.
/// `score` must be deterministic for reproducible results.
pub(crate) fn polish_basis<F>(
    basis: &DMatrix<f64>,
    start: f64,
    maximize: bool,
    rng: &mut ChaCha8Rng,
    rounds: usize,
    score: F,
) -> (DMatrix<f64>, f64, bool)
where
    F: Fn(&DMatrix<f64>) -> f64,
{
    let scales = [0.3, 0.1, 0.03, 0.01];
    let mut best = basis.clone();
    let mut best_score = start;
    let mut improved = false;
    for round in 0..rounds {
        let scale = scales[round % scales.len()];
        let noise = gaussian_matrix(rng, basis.nrows(), basis.ncols());
        let Some(cand) = orthonormalize(&(&best + scale * noise)) else {
            continue;
        };
        let s = score(&cand);
        let better = if maximize { s > best_score } else { s < best_score };
        if better {
            best = cand;
            best_score = s;
            improved = true;
        }
    }
    (best, best_score, improved)
}

/// Certified upper bound for the norm of `a: l_2^k -> l_src^m`.
pub(crate) fn contraction_upper_bound(a: &DMatrix<f64>, src: Exponent) -> f64 {
    let sigma_max = a.clone().svd(false, false).singular_values.max();
    let row_norms: Vec<f64> = (0..a.nrows())
        .map(|i| a.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    match src {
        Exponent::Infinity => row_norms.iter().copied().fold(0.0, f64::max),
        Exponent::Finite(p) if p == 2.0 => sigma_max,
        Exponent::Finite(p) => {
            // ||y||_p <= m^{(1/p - 1/2)_+} ||y||_2 and the rowwise Cauchy
            // Schwarz bound; both are certified, take the smaller.
            let excess = (1.0 / p - 0.5).max(0.0);
            let interp = (a.nrows() as f64).powf(excess) * sigma_max;
            let rowwise = pnorm(&row_norms, src);
            interp.min(rowwise)
        }
    }
}

/// Candidate contractions for the Weyl search: matrices rescaled so the
/// certified bound on their `l_2 -> l_src` norm is exactly 1.
pub(crate) fn contractions(
    op: &FiniteOperator,
    budget: &OptimBudget,
    tag: u64,
) -> Vec<Candidate> {
    let m = op.cols();
    let mut rng = rng_for(budget.seed, tag, 3);
    let mut raw: Vec<(&'static str, DMatrix<f64>)> = vec![("identity", DMatrix::identity(m, m))];
    for (i, w) in singular_windows(op, m.min(op.rank().max(1)), false)
        .into_iter()
        .enumerate()
    {
        if i == 0 {
            raw.push(("singular", w));
        }
    }
    let extra = (budget.restarts as usize / 8).max(4);
    for _ in 0..extra {
        raw.push(("random", gaussian_matrix(&mut rng, m, m)));
    }
    let mut out = Vec::new();
    for (family, a) in raw {
        let ub = contraction_upper_bound(&a, op.src);
        if ub <= 0.0 || !ub.is_finite() {
            continue;
        }
        out.push(Candidate {
            family,
            basis: a / ub,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn combinations_enumerate_lexicographically() {
        let c = small_combinations(4, 2, 10).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c[0], vec![0, 1]);
        assert_eq!(c[5], vec![2, 3]);
        assert!(small_combinations(20, 10, 128).is_none());
    }

    #[test]
    fn source_candidates_are_orthonormal() {
        let op = FiniteOperator::identity_of(5, e(1.0), e(2.0)).unwrap();
        let budget = OptimBudget {
            restarts: 32,
            ..OptimBudget::default()
        };
        let cands = source_bases(&op, 2, &budget, 7);
        assert!(cands.len() >= 10);
        for c in &cands {
            let g = c.basis.transpose() * &c.basis;
            for i in 0..2 {
                for j in 0..2 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g[(i, j)] - want).abs() < 1e-10, "{}", c.family);
                }
            }
        }
    }

    #[test]
    fn kernel_basis_annihilates_constraints() {
        let c = DMatrix::from_column_slice(4, 1, &[0.5; 4]); // normalized ones
        let k = kernel_basis(&c).unwrap();
        assert_eq!(k.ncols(), 3);
        let prod = c.transpose() * &k;
        assert!(prod.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn contraction_bound_is_exact_on_easy_cases() {
        let id = DMatrix::<f64>::identity(4, 4);
        // l_2 -> l_1 norm of the identity is 2 = sqrt(4).
        assert!((contraction_upper_bound(&id, e(1.0)) - 2.0).abs() < 1e-12);
        // l_2 -> l_inf norm is 1.
        assert!((contraction_upper_bound(&id, Exponent::Infinity) - 1.0).abs() < 1e-12);
        assert!((contraction_upper_bound(&id, e(2.0)) - 1.0).abs() < 1e-12);
    }
}
