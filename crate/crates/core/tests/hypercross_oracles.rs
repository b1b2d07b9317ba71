//! Oracle checks for the dyadic-cell field norms: the adaptive integrator is
//! compared against a brute-force uniform-grid evaluation, and the block
//! probe slopes are compared against closed-form exponents.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use widths_core::{
    block_embedding_norm_probe, bnorm, enumerate_block, fnorm, CoeffField, Exponent, HyperIndex,
    OptimBudget, ParamSet,
};

fn e(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

/// Brute force: evaluate the step function on a uniform grid of per-axis
/// resolution `res` and integrate cell by cell. Exact whenever `res` is at
/// least the deepest level in the field, because the integrand is constant
/// on each grid cell.
fn grid_fnorm(field: &CoeffField, t: f64, p: f64, q: Exponent, res: u32) -> f64 {
    let d = field.dim();
    let cells = 1u64 << (res as u64 * d as u64);
    let mut total = 0.0;
    for cell in 0..cells {
        // Decode the cell index into per-axis positions at resolution `res`.
        let mut coord = vec![0u64; d];
        let mut rest = cell;
        for c in coord.iter_mut().rev() {
            *c = rest & ((1 << res) - 1);
            rest >>= res;
        }
        // Group |coefficients| covering this cell by level vector.
        let mut per_level: Vec<(Vec<u32>, f64)> = Vec::new();
        for (idx, value) in field.iter() {
            let covers = (0..d).all(|ax| coord[ax] >> (res - idx.level()[ax]) == idx.pos()[ax]);
            if !covers {
                continue;
            }
            match per_level.iter_mut().find(|(l, _)| *l == idx.level()) {
                Some((_, v)) => *v += value.norm(),
                None => per_level.push((idx.level().to_vec(), value.norm())),
            }
        }
        let weighted: Vec<f64> = per_level
            .iter()
            .map(|(l, v)| (l.iter().sum::<u32>() as f64 * t).exp2() * v)
            .collect();
        let combined = if q.is_infinite() {
            weighted.iter().cloned().fold(0.0, f64::max)
        } else {
            weighted
                .iter()
                .map(|w| w.powf(q.value()))
                .sum::<f64>()
                .powf(q.recip())
        };
        total += combined.powf(p) / cells as f64;
    }
    total.powf(1.0 / p)
}

fn random_field(rng: &mut ChaCha8Rng, dim: u32, max_level: u32, entries: usize) -> CoeffField {
    let mut field = CoeffField::new(dim as usize).unwrap();
    for _ in 0..entries {
        let level: Vec<u32> = (0..dim).map(|_| rng.random_range(0..=max_level)).collect();
        let pos: Vec<u64> = level.iter().map(|&nu| rng.random_range(0..1u64 << nu)).collect();
        let value = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        field
            .insert(HyperIndex::new(level, pos).unwrap(), value)
            .unwrap();
    }
    field
}

#[test]
fn integrator_matches_uniform_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f0e);
    for (dim, max_level, res) in [(1u32, 3u32, 4u32), (2, 3, 4), (3, 2, 3)] {
        for (t, p, q) in [(0.0, 1.0, 1.5), (0.7, 2.5, 1.0), (0.4, 1.5, f64::INFINITY), (0.0, 3.0, 2.0)] {
            let field = random_field(&mut rng, dim, max_level, 7);
            let coarse = grid_fnorm(&field, t, p, e(q), res);
            let fine = grid_fnorm(&field, t, p, e(q), res + 1);
            assert!(
                (coarse - fine).abs() <= 1e-12 * coarse.max(1.0),
                "grid refinement moved: {coarse} vs {fine}"
            );
            let fast = fnorm(&field, t, e(p), e(q)).unwrap();
            assert!(
                (fast - coarse).abs() <= 1e-9 * coarse.max(1e-12),
                "dim={dim} t={t} p={p} q={q}: integrator {fast} vs grid {coarse}"
            );
        }
    }
}

#[test]
fn single_block_norms_coincide_when_p_equals_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51b1);
    let mut checked = 0;
    for dim in 1..=3u32 {
        for _ in 0..34 {
            let mu = rng.random_range(0..=8u32);
            let layout = enumerate_block(mu, dim).unwrap();
            let mut field = CoeffField::new(dim as usize).unwrap();
            // A handful of entries scattered over the block's levels.
            for level in &layout.levels {
                for _ in 0..3 {
                    let pos: Vec<u64> =
                        level.iter().map(|&nu| rng.random_range(0..1u64 << nu)).collect();
                    let value =
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    field
                        .insert(HyperIndex::new(level.to_vec(), pos).unwrap(), value)
                        .unwrap();
                }
            }
            if field.is_zero() {
                continue;
            }
            for (t, p) in [(0.0, 1.0), (1.5, 1.0), (0.5, 2.0), (0.3, 4.0)] {
                let b = bnorm(&field, t, e(p), e(p));
                let f = fnorm(&field, t, e(p), e(p)).unwrap();
                assert!(
                    (b - f).abs() <= 1e-10 * b.max(1e-300),
                    "dim={dim} mu={mu} t={t} p={p}: bnorm {b} vs fnorm {f}"
                );
            }
            checked += 1;
        }
    }
    assert!(checked >= 100, "only {checked} block fields checked");
}

#[test]
fn probe_slope_matches_predicted_exponent() {
    let budget = OptimBudget::default();
    for (t, p1, p2) in [(1.0, 2.0, 2.0), (1.5, 1.0, 2.0)] {
        let params = ParamSet::new(2, t, e(p1), e(p2), e(p1)).unwrap();
        let mus: Vec<u32> = (4..=10).collect();
        let logs: Vec<f64> = mus
            .iter()
            .map(|&mu| {
                let probe = block_embedding_norm_probe(mu, &params, &budget).unwrap();
                assert!(probe.measured > 0.0);
                probe.measured.log2()
            })
            .collect();
        let n = mus.len() as f64;
        let mx = mus.iter().map(|&m| m as f64).sum::<f64>() / n;
        let my = logs.iter().sum::<f64>() / n;
        let slope = mus
            .iter()
            .zip(&logs)
            .map(|(&m, &y)| (m as f64 - mx) * (y - my))
            .sum::<f64>()
            / mus.iter().map(|&m| (m as f64 - mx).powi(2)).sum::<f64>();
        let predicted = -t + (1.0 / p1 - 1.0 / p2).max(0.0);
        assert!(
            (slope - predicted).abs() < 0.1,
            "t={t} p1={p1} p2={p2}: slope {slope} vs predicted {predicted}"
        );
    }
}

#[test]
fn serialization_round_trips_and_is_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xdead);
    for dim in 1..=3u32 {
        let field = random_field(&mut rng, dim, 6, 25);
        let text = field.serialize();
        let back = CoeffField::parse(&text, dim as usize).unwrap();
        assert_eq!(field, back);
        assert_eq!(text, back.serialize(), "serialization not canonical");
    }
}
