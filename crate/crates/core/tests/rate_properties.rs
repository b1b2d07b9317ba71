//! Stress tests of the regime classifiers: random parameter sweeps for
//! exhaustiveness, analytic agreement on shared case boundaries, collapse of
//! the mixed tables to the isotropic ones in one dimension, and lexicographic
//! dominance of the Bernstein decay over the Weyl decay.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use widths_core::{
    bernstein_rate_isotropic, bernstein_rate_mixed, weyl_rate_isotropic, weyl_rate_mixed,
    CoreError, Exponent, ParamSet, RateExponents,
};

fn e(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

const P_GRID: [f64; 10] = [1.0, 1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0, f64::INFINITY];

/// A random compact parameter set. `scale_d` divides out the dimension so the
/// same draw works for both smoothness scales. `p2_open` restricts p2 to the
/// open interval (1, inf) required by the mixed tables.
fn sample(rng: &mut ChaCha8Rng, mixed: bool, p2_open: bool) -> ParamSet {
    loop {
        let d = rng.random_range(1..=4u32);
        let p1 = P_GRID[rng.random_range(0..P_GRID.len())];
        let p2 = P_GRID[rng.random_range(0..P_GRID.len())];
        if p2_open && !(1.0 < p2 && p2.is_finite()) {
            continue;
        }
        let gap = (1.0 / p1 - 1.0 / p2).max(0.0);
        let scale = if mixed { 1.0 } else { d as f64 };
        let t = scale * (gap + rng.random_range(0.01..2.5));
        return ParamSet::new(d, t, e(p1), e(p2), e(p1)).unwrap();
    }
}

/// `Ok` for a classified case, `None` for the one corner the tables leave
/// open (p2 <= 1 < 2 < p1 at low smoothness). Anything else is a bug: the
/// samples are compact and drawn away from every guard band.
fn classify_or_skip(
    r: Result<RateExponents, CoreError>,
    corners: &mut u32,
) -> Option<RateExponents> {
    match r {
        Ok(v) => Some(v),
        Err(CoreError::Boundary(msg)) if msg.contains("limiting case") => {
            *corners += 1;
            None
        }
        Err(other) => panic!("unexpected classifier failure: {other}"),
    }
}

#[test]
fn classifiers_are_exhaustive_on_random_compact_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut corners = 0u32;
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..10_000 {
        let iso = sample(&mut rng, false, false);
        for r in [bernstein_rate_isotropic(&iso), weyl_rate_isotropic(&iso)] {
            if let Some(v) = classify_or_skip(r, &mut corners) {
                assert!(v.alpha > 0.0, "nonpositive alpha for {iso:?}: {v:?}");
                assert!(!v.is_interval(), "isotropic tables are pure powers");
                assert_eq!(v.beta(), Some(0.0));
                seen.insert(v.case.clone());
            }
        }
        let mix = sample(&mut rng, true, true);
        for r in [bernstein_rate_mixed(&mix), weyl_rate_mixed(&mix)] {
            if let Some(v) = classify_or_skip(r, &mut corners) {
                assert!(v.alpha > 0.0, "nonpositive alpha for {mix:?}: {v:?}");
                assert_eq!(
                    v.is_interval(),
                    v.case == "bernstein-mixed-open",
                    "interval outside the open case: {v:?}"
                );
                assert_eq!(v.two_sided, v.case != "bernstein-mixed-open");
                seen.insert(v.case.clone());
            }
        }
    }
    // The open corner is rare but reachable; everything else classifies.
    assert!(corners < 500, "{corners} draws hit the open corner");
    for expected in [
        "bernstein-isotropic-case-i",
        "bernstein-isotropic-case-ii",
        "bernstein-isotropic-case-iii",
        "bernstein-isotropic-case-iv",
        "bernstein-mixed-case-i",
        "bernstein-mixed-case-ii",
        "bernstein-mixed-case-iii",
        "bernstein-mixed-case-iv",
        "bernstein-mixed-case-v",
        "bernstein-mixed-open",
        "weyl-isotropic-case-i",
        "weyl-isotropic-case-ii",
        "weyl-isotropic-case-iii",
        "weyl-isotropic-case-iv",
        "weyl-isotropic-case-v",
        "weyl-mixed-case-i",
        "weyl-mixed-case-ii",
        "weyl-mixed-case-iii",
        "weyl-mixed-case-iv",
        "weyl-mixed-case-v",
        "weyl-mixed-case-vi",
    ] {
        assert!(seen.contains(expected), "case never sampled: {expected}");
    }
}

/// Where the tables change case along a t-threshold with matching formulas,
/// the two closed forms agree identically at the threshold. Evaluated
/// symbolically: plug the threshold value of t into both case formulas.
#[test]
fn adjacent_case_formulas_agree_on_their_shared_boundary() {
    for p1 in [2.5f64, 3.0, 4.0, 6.0, 10.0] {
        for p2 in [2.0f64, 2.5, 3.0] {
            if p2 > p1 {
                continue;
            }
            // High-smoothness vs low-smoothness split for p1, p2 >= 2.
            let thr = (1.0 / p2 - 1.0 / p1) / (p1 / 2.0 - 1.0);
            let alpha_high = thr + 1.0 / p2 - 1.0 / p1;
            let alpha_low = thr * p1 / 2.0;
            assert!(
                (alpha_high - alpha_low).abs() < 1e-12,
                "p1={p1} p2={p2}: {alpha_high} vs {alpha_low}"
            );
        }
        // Split at t = 1/p1 for p2 <= 2 <= p1: both sides give 1/2.
        let thr: f64 = 1.0 / p1;
        let alpha_high = thr - 1.0 / p1 + 0.5;
        let alpha_low = thr * p1 / 2.0;
        assert!((alpha_high - alpha_low).abs() < 1e-12, "p1={p1}");
    }
    // Low/high smoothness split of the mixed tables for p1, p2 <= 2: the
    // log exponent vanishes exactly at t = 1/p1 - 1/2.
    for p1 in [1.0f64, 1.2, 1.5] {
        let thr = 1.0 / p1 - 0.5;
        assert!((thr + 0.5 - 1.0 / p1).abs() < 1e-15);
    }
}

#[test]
fn one_dimensional_mixed_tables_collapse_to_isotropic() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut compared = 0;
    while compared < 1_000 {
        let pr = sample(&mut rng, true, true);
        let pr = ParamSet::new(1, pr.t, pr.p1, pr.p2, pr.q).unwrap();
        let iso_b = bernstein_rate_isotropic(&pr).unwrap();
        let mix_b = bernstein_rate_mixed(&pr).unwrap();
        // In one dimension the log factor carries exponent (d-1) beta = 0,
        // so agreement of alpha is the whole claim.
        if mix_b.is_interval() {
            assert_eq!(iso_b.alpha, mix_b.alpha);
        } else {
            assert!(
                (iso_b.alpha - mix_b.alpha).abs() < 1e-12,
                "bernstein d=1: {iso_b:?} vs {mix_b:?}"
            );
        }
        let iso_w = weyl_rate_isotropic(&pr).unwrap();
        let mix_w = weyl_rate_mixed(&pr).unwrap();
        assert!(
            (iso_w.alpha - mix_w.alpha).abs() < 1e-12,
            "weyl d=1: {iso_w:?} vs {mix_w:?}"
        );
        compared += 1;
    }
}

/// Bernstein numbers are dominated by Weyl numbers, so their decay envelope
/// must be at least as fast: alpha_b > alpha_w, or equal alpha and a log
/// exponent no larger. The open Bernstein case compares via its upper bound.
#[test]
fn bernstein_decay_dominates_weyl_decay() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let mut corners = 0u32;
    for _ in 0..10_000 {
        let iso = sample(&mut rng, false, false);
        if let Some(b) = classify_or_skip(bernstein_rate_isotropic(&iso), &mut corners) {
            let w = weyl_rate_isotropic(&iso).unwrap();
            assert!(
                b.alpha >= w.alpha - 1e-12,
                "isotropic {iso:?}: b {b:?} slower than w {w:?}"
            );
        }

        let mix = sample(&mut rng, true, true);
        let b = bernstein_rate_mixed(&mix).unwrap();
        let w = weyl_rate_mixed(&mix).unwrap();
        let faster_power = b.alpha > w.alpha + 1e-12;
        let same_power = (b.alpha - w.alpha).abs() <= 1e-12;
        let log_ok = (mix.d - 1) as f64 * (b.beta_hi - w.beta_hi) <= 1e-12;
        assert!(
            faster_power || (same_power && log_ok),
            "mixed {mix:?}: b {b:?} slower than w {w:?}"
        );
    }
}
