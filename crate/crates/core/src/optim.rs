//! Shared optimization machinery for the width estimators: seeded multistart
//! generation, projected gradient ascent/descent of norm ratios on spheres,
//! and distances to subspaces in arbitrary p-norms.
//!
//! Stepping uses plain step halving with a relative-improvement stopping rule
//! of `1e-10`; every run is bounded by an iteration cap so a stalled line
//! search cannot spin.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::exponent::Exponent;
use crate::pnorm::{pnorm, pnorm_gradient};

pub(crate) const REL_IMPROVEMENT_STOP: f64 = 1e-10;

/// SplitMix64-style mixing so that every (master, tag, index) triple gets an
/// independent, reproducible stream.
pub(crate) fn mix_seed(master: u64, tag: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(tag.wrapping_mul(0xbf58_476d_1ce4_e5b9))
        .wrapping_add(index.wrapping_mul(0x94d0_49bb_1331_11eb))
        .wrapping_add(0x2545_f491_4f6c_dd1d);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn rng_for(master: u64, tag: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(master, tag, index))
}

pub(crate) fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub(crate) fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Orthonormalizes the columns; `None` when the columns are numerically
/// dependent.
pub(crate) fn orthonormalize(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let qr = m.clone().qr();
    let q = qr.q();
    let r = qr.r();
    for i in 0..m.ncols().min(r.nrows()) {
        if r[(i, i)].abs() < 1e-10 {
            return None;
        }
    }
    Some(q)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ratio `c -> pnorm(A c, num_norm) / pnorm(B c, den_norm)`, where `B = None`
/// means the identity. Covers operator norms (`A = M`, `B = I`), restricted
/// norms on a subspace (`A = T V`, `B = V`), and their reciprocals.
pub(crate) struct RatioProblem<'a> {
    pub num_map: &'a DMatrix<f64>,
    pub den_map: Option<&'a DMatrix<f64>>,
    pub num_norm: Exponent,
    pub den_norm: Exponent,
}

pub(crate) struct ExtremizeOutcome {
    pub value: f64,
    pub point: Vec<f64>,
    pub converged: bool,
}

impl RatioProblem<'_> {
    pub fn dim(&self) -> usize {
        match self.den_map {
            Some(b) => b.ncols(),
            None => self.num_map.ncols(),
        }
    }

    fn den_vec(&self, c: &[f64]) -> Vec<f64> {
        match self.den_map {
            Some(b) => mat_vec(b, c),
            None => c.to_vec(),
        }
    }

    pub fn eval(&self, c: &[f64]) -> f64 {
        let num = pnorm(&mat_vec(self.num_map, c), self.num_norm);
        let den = pnorm(&self.den_vec(c), self.den_norm);
        if den == 0.0 {
            return 0.0;
        }
        num / den
    }

    /// Gradient of the ratio at `c`; exact where the norms are smooth, a
    /// subgradient at kinks.
    fn grad(&self, c: &[f64]) -> Vec<f64> {
        let y = mat_vec(self.num_map, c);
        let u = self.den_vec(c);
        let num = pnorm(&y, self.num_norm);
        let den = pnorm(&u, self.den_norm);
        if den == 0.0 {
            return vec![0.0; c.len()];
        }
        let gy = pnorm_gradient(&y, self.num_norm);
        let mut g = mat_t_vec(self.num_map, &gy);
        let gu = pnorm_gradient(&u, self.den_norm);
        let gd = match self.den_map {
            Some(b) => mat_t_vec(b, &gu),
            None => gu,
        };
        let f = num / den;
        for i in 0..g.len() {
            g[i] = (g[i] - f * gd[i]) / den;
        }
        g
    }

    fn normalize(&self, c: &[f64]) -> Option<Vec<f64>> {
        let den = pnorm(&self.den_vec(c), self.den_norm);
        if den <= 0.0 || !den.is_finite() {
            return None;
        }
        Some(c.iter().map(|v| v / den).collect())
    }

    /// Projected gradient ascent (`maximize`) or descent of the ratio from
    /// `c0`, with step halving and the shared stopping rule.
    pub fn extremize(&self, c0: &[f64], maximize: bool, max_iter: u32) -> ExtremizeOutcome {
        let mut x = match self.normalize(c0) {
            Some(x) => x,
            None => {
                return ExtremizeOutcome {
                    value: if maximize { f64::NEG_INFINITY } else { f64::INFINITY },
                    point: c0.to_vec(),
                    converged: false,
                }
            }
        };
        let mut f = self.eval(&x);
        // A zero ratio is the global minimum; descending from it is done, and
        // ascending from the kernel has no usable gradient.
        if f == 0.0 {
            return ExtremizeOutcome {
                value: 0.0,
                point: x,
                converged: !maximize,
            };
        }
        let sign = if maximize { 1.0 } else { -1.0 };
        let mut step = 0.5_f64;
        let mut converged = false;
        for _ in 0..max_iter {
            let g = self.grad(&x);
            let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gn < 1e-300 {
                converged = true;
                break;
            }
            let mut accepted = false;
            while step > 1e-16 {
                let cand: Vec<f64> = x
                    .iter()
                    .zip(&g)
                    .map(|(xi, gi)| xi + sign * step * gi / gn)
                    .collect();
                let cand = match self.normalize(&cand) {
                    Some(c) => c,
                    None => {
                        step *= 0.5;
                        continue;
                    }
                };
                let fc = self.eval(&cand);
                let improved = if maximize { fc > f } else { fc < f && fc.is_finite() };
                if improved {
                    let rel = (fc - f).abs() / f.abs().max(1e-300);
                    x = cand;
                    f = fc;
                    accepted = true;
                    step = (step * 1.5).min(16.0);
                    if rel < REL_IMPROVEMENT_STOP {
                        converged = true;
                    }
                    break;
                }
                step *= 0.5;
            }
            if converged || !accepted {
                converged = converged || !accepted;
                break;
            }
            if f == 0.0 {
                converged = true;
                break;
            }
        }
        ExtremizeOutcome {
            value: f,
            point: x,
            converged,
        }
    }
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(m.ncols(), x.len());
    let mut y = vec![0.0; m.nrows()];
    for (j, xj) in x.iter().enumerate() {
        if *xj == 0.0 {
            continue;
        }
        for i in 0..m.nrows() {
            y[i] += m[(i, j)] * xj;
        }
    }
    y
}

pub(crate) fn mat_t_vec(m: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(m.nrows(), y.len());
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)] * y[i]).sum())
        .collect()
}

/// Deterministic start vectors for a dimension-`n` search: coordinate
/// directions, the constant vector, an alternating sign vector.
pub(crate) fn deterministic_starts(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n + 2);
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        out.push(v);
    }
    out.push(vec![1.0; n]);
    if n > 1 {
        out.push((0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect());
    }
    out
}

/// All sign-and-support patterns in `{-1, 0, 1}^n` (up to global sign, zero
/// excluded) when there are at most `cap` of them; otherwise a seeded sample.
/// Extremal vectors of small p-norm problems routinely sit on these lattices,
/// so probing them pins values exactly instead of relying on descent alone.
pub(crate) fn pattern_probes(n: usize, cap: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let total = 3usize.saturating_pow(n as u32);
    let mut out = Vec::new();
    if total <= 2 * cap + 1 {
        for code in 1..total {
            let mut c = code;
            let mut v = vec![0.0; n];
            let mut leading = 0.0;
            for slot in v.iter_mut() {
                let digit = (c % 3) as i32 - 1;
                c /= 3;
                *slot = digit as f64;
                if leading == 0.0 {
                    leading = *slot;
                }
            }
            // Skip the all-zero pattern and one of each antipodal pair.
            if leading <= 0.0 {
                continue;
            }
            out.push(v);
        }
    } else {
        for _ in 0..cap {
            let v: Vec<f64> = (0..n)
                .map(|_| match rng.random_range(0..3u8) {
                    0 => -1.0,
                    1 => 0.0,
                    _ => 1.0,
                })
                .collect();
            if v.iter().any(|x| *x != 0.0) {
                out.push(v);
            }
        }
    }
    out
}

/// Distance `min_w pnorm(y - basis * w, q)` from `y` to the column span of
/// `basis` (orthonormal columns), together with the optimal residual
/// `y - basis * w`, which carries the subgradient information for outer
/// maximizations over `y`. Exact for `q = 2`; iteratively reweighted least
/// squares for other finite `q`; subgradient descent for `q = inf`.
pub(crate) fn dist_residual(y: &[f64], basis: &DMatrix<f64>, q: Exponent) -> (f64, Vec<f64>) {
    let k = basis.ncols();
    if k == 0 {
        return (pnorm(y, q), y.to_vec());
    }
    let w0 = mat_t_vec(basis, y);
    let resid = |w: &[f64]| -> Vec<f64> {
        let bw = mat_vec(basis, w);
        y.iter().zip(&bw).map(|(a, b)| a - b).collect()
    };
    match q {
        Exponent::Finite(qv) if qv == 2.0 => {
            let r = resid(&w0);
            (pnorm(&r, q), r)
        }
        Exponent::Finite(qv) => {
            // IRLS with clamped weights |r_i|^(q-2).
            let mut w = w0;
            let mut best = pnorm(&resid(&w), q);
            for _ in 0..80 {
                let r = resid(&w);
                let weights: Vec<f64> = r
                    .iter()
                    .map(|ri| ri.abs().max(1e-12).powf(qv - 2.0))
                    .collect();
                // Solve (B^T W B) w = B^T W y.
                let mut a = DMatrix::zeros(k, k);
                let mut rhs = vec![0.0; k];
                for i in 0..basis.nrows() {
                    let wi = weights[i];
                    for c1 in 0..k {
                        let bic1 = basis[(i, c1)];
                        rhs[c1] += wi * bic1 * y[i];
                        for c2 in c1..k {
                            a[(c1, c2)] += wi * bic1 * basis[(i, c2)];
                        }
                    }
                }
                for c1 in 0..k {
                    for c2 in 0..c1 {
                        a[(c1, c2)] = a[(c2, c1)];
                    }
                }
                let rhs_m = DMatrix::from_column_slice(k, 1, &rhs);
                let sol = match a.lu().solve(&rhs_m) {
                    Some(s) => s,
                    None => break,
                };
                let w_new: Vec<f64> = sol.column(0).iter().copied().collect();
                let val = pnorm(&resid(&w_new), q);
                if val <= best {
                    let rel = (best - val) / best.max(1e-300);
                    w = w_new;
                    best = val;
                    if rel < 1e-13 {
                        break;
                    }
                } else {
                    break;
                }
            }
            let r = resid(&w);
            (best, r)
        }
        Exponent::Infinity => {
            let mut w = w0;
            let mut best = pnorm(&resid(&w), q);
            let mut step = best.max(1e-12);
            for _ in 0..400 {
                let r = resid(&w);
                let g = pnorm_gradient(&r, q);
                // Descend on w: d/dw = -B^T g.
                let gw = mat_t_vec(basis, &g);
                let gn = gw.iter().map(|v| v * v).sum::<f64>().sqrt();
                if gn < 1e-300 {
                    break;
                }
                let mut improved = false;
                while step > 1e-15 {
                    let cand: Vec<f64> = w
                        .iter()
                        .zip(&gw)
                        .map(|(wi, gi)| wi + step * gi / gn)
                        .collect();
                    let val = pnorm(&resid(&cand), q);
                    if val < best {
                        let rel = (best - val) / best.max(1e-300);
                        w = cand;
                        best = val;
                        improved = true;
                        step *= 1.5;
                        if rel < 1e-12 {
                            let r = resid(&w);
                            return (best, r);
                        }
                        break;
                    }
                    step *= 0.5;
                }
                if !improved {
                    break;
                }
            }
            let r = resid(&w);
            (best, r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn seed_mixing_is_stable_and_spread() {
        let a = mix_seed(0, 1, 2);
        let b = mix_seed(0, 1, 3);
        assert_eq!(a, mix_seed(0, 1, 2));
        assert_ne!(a, b);
    }

    #[test]
    fn ascent_finds_the_l2_to_l1_norm_of_the_identity() {
        // max ||x||_1 subject to ||x||_2 = 1 equals sqrt(m), at the constant
        // vector.
        let m = 4;
        let id = DMatrix::<f64>::identity(m, m);
        let prob = RatioProblem {
            num_map: &id,
            den_map: None,
            num_norm: e(1.0),
            den_norm: e(2.0),
        };
        let mut best = 0.0_f64;
        let mut rng = rng_for(7, 0, 0);
        let mut starts = deterministic_starts(m);
        for _ in 0..8 {
            starts.push(gaussian_vec(&mut rng, m));
        }
        for s in starts {
            best = best.max(prob.extremize(&s, true, 500).value);
        }
        assert!((best - 2.0).abs() < 1e-7, "got {best}");
    }

    #[test]
    fn descent_finds_the_diagonal_minimum() {
        // min ||x||_2 / ||x||_1 over a 2-dim coordinate subspace is 1/sqrt(2).
        let id = DMatrix::<f64>::identity(2, 2);
        let prob = RatioProblem {
            num_map: &id,
            den_map: None,
            num_norm: e(2.0),
            den_norm: e(1.0),
        };
        let out = prob.extremize(&[1.0, 0.3], false, 500);
        assert!(
            (out.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9,
            "got {}",
            out.value
        );
    }

    #[test]
    fn subspace_distances() {
        // Distance from e1 to span{(1,1)/sqrt(2)} in l2 is 1/sqrt(2).
        let basis = DMatrix::from_column_slice(2, 1, &[std::f64::consts::FRAC_1_SQRT_2; 2]);
        let d2 = dist_residual(&[1.0, 0.0], &basis, e(2.0)).0;
        assert!((d2 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

        // In l1 the same distance is 1: minimize |1-c| + |c| over c.
        let d1 = dist_residual(&[1.0, 0.0], &basis, e(1.0)).0;
        assert!((d1 - 1.0).abs() < 1e-6, "got {d1}");

        // In sup norm it is 1/2, at c = 1/2.
        let dinf = dist_residual(&[1.0, 0.0], &basis, Exponent::Infinity).0;
        assert!((dinf - 0.5).abs() < 1e-6, "got {dinf}");
    }

    #[test]
    fn pattern_probes_cover_small_lattices() {
        let mut rng = rng_for(1, 2, 3);
        let probes = pattern_probes(2, 100, &mut rng);
        // (3^2 - 1) / 2 = 4 patterns up to global sign.
        assert_eq!(probes.len(), 4);
    }
}
