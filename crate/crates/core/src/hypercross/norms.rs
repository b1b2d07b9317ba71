//! The two norms on coefficient fields.
//!
//! `bnorm` is the weighted mixed sequence norm: inside each level `nu` take
//! the p-norm of the coefficients, weight it by `2^{|nu|_1 (t - 1/p)}`, then
//! take the q-norm across levels. `fnorm` is the L_p norm of the lq-valued
//! dyadic step function `x -> ( sum_{(nu,m): x in Q_{nu,m}} |2^{|nu|_1 t}
//! lambda_{nu,m}|^q )^{1/q}`. Both use the usual sup modifications at an
//! infinite exponent; the f-scale additionally requires p < infinity.

use num_complex::Complex64;

use crate::error::{guard, invalid, Result};
use crate::exponent::Exponent;
use crate::pnorm::{pnorm, pnorm_complex};

use super::{CoeffField, HyperIndex};

/// Neumaier compensated summation; order-independent to ~1 ulp.
#[derive(Clone, Copy, Default)]
pub(crate) struct Accum {
    sum: f64,
    comp: f64,
}

impl Accum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// The b-scale norm of `field` with smoothness `t` and exponents `(p, q)`.
/// Zero exactly on the zero field.
pub fn bnorm(field: &CoeffField, t: f64, p: Exponent, q: Exponent) -> f64 {
    debug_assert!(t.is_finite());
    let mut weighted: Vec<f64> = Vec::new();
    let mut bucket: Vec<Complex64> = Vec::new();
    let mut cur: Option<&[u32]> = None;
    // Entries are sorted by level first, so one linear pass groups them.
    for (k, v) in field.iter() {
        if cur != Some(k.level()) {
            if let Some(level) = cur {
                weighted.push(level_weight(level, t, p) * pnorm_complex(&bucket, p));
                bucket.clear();
            }
            cur = Some(k.level());
        }
        bucket.push(*v);
    }
    if let Some(level) = cur {
        weighted.push(level_weight(level, t, p) * pnorm_complex(&bucket, p));
    }
    pnorm(&weighted, q)
}

fn level_weight(level: &[u32], t: f64, p: Exponent) -> f64 {
    let total: u32 = level.iter().sum();
    (total as f64 * (t - p.recip())).exp2()
}

/// Caps for the exact integration path. The `p == q` case reduces to a plain
/// sum over the support and is exempt.
const FNORM_MAX_DIM: usize = 3;
const FNORM_MAX_LEVEL: u32 = 10;

/// The f-scale norm of `field`: exact, no quadrature error.
///
/// For `p == q` the q-sum commutes with the integral and the value is a
/// weighted sum over the support, at any dimension and depth. Otherwise the
/// unit cube is split recursively along the dyadic cell boundaries of the
/// support and the integrand, constant on each leaf, is summed exactly; this
/// path is capped at d <= 3 and support level <= 10.
pub fn fnorm(field: &CoeffField, t: f64, p: Exponent, q: Exponent) -> Result<f64> {
    debug_assert!(t.is_finite());
    let Exponent::Finite(pv) = p else {
        return Err(invalid("f-scale requires p < \u{221e}"));
    };
    if field.is_zero() {
        return Ok(0.0);
    }
    if let Exponent::Finite(qv) = q {
        if qv == pv {
            // integral of sum = sum of integrals of |w chi|^p
            let mut acc = Accum::default();
            for (k, v) in field.iter() {
                let w = (k.total_level() as f64 * t).exp2() * v.norm();
                acc.add(w.powf(pv) * (-(k.total_level() as f64)).exp2());
            }
            return Ok(acc.total().powf(1.0 / pv));
        }
    }

    let d = field.dim();
    if d > FNORM_MAX_DIM {
        return Err(guard(format!(
            "f-scale integration handles d <= {FNORM_MAX_DIM}, got {d}"
        )));
    }
    let j = field.max_level();
    if j > FNORM_MAX_LEVEL {
        return Err(guard(format!(
            "f-scale integration caps the support level at {FNORM_MAX_LEVEL}, got {j}"
        )));
    }

    let entries: Vec<(&HyperIndex, f64)> = field
        .iter()
        .map(|(k, v)| (k, (k.total_level() as f64 * t).exp2() * v.norm()))
        .collect();
    let active: Vec<usize> = (0..entries.len()).collect();
    let mut acc = Accum::default();
    descend(
        &entries,
        active,
        &mut vec![0u32; d],
        &mut vec![0u64; d],
        0.0,
        pv,
        q,
        &mut acc,
    );
    Ok(acc.total().powf(1.0 / pv))
}

enum Rel {
    Disjoint,
    Covers,
    Finer,
}

fn relate(e: &HyperIndex, rl: &[u32], rp: &[u64]) -> Rel {
    let mut finer = false;
    for l in 0..rl.len() {
        let (el, ep) = (e.level()[l], e.pos()[l]);
        if el <= rl[l] {
            if ep != rp[l] >> (rl[l] - el) {
                return Rel::Disjoint;
            }
        } else {
            if (ep >> (el - rl[l])) != rp[l] {
                return Rel::Disjoint;
            }
            finer = true;
        }
    }
    if finer {
        Rel::Finer
    } else {
        Rel::Covers
    }
}

/// Splits the box `(rl, rp)` until every active entry covers it, then adds
/// the constant integrand times the box volume. `cover` carries the q-sum
/// (or running max, q infinite) of weights inherited from enclosing boxes.
#[allow(clippy::too_many_arguments)]
fn descend(
    entries: &[(&HyperIndex, f64)],
    active: Vec<usize>,
    rl: &mut Vec<u32>,
    rp: &mut Vec<u64>,
    mut cover: f64,
    p: f64,
    q: Exponent,
    acc: &mut Accum,
) {
    let mut finer: Vec<usize> = Vec::new();
    for &i in &active {
        match relate(entries[i].0, rl, rp) {
            Rel::Disjoint => {}
            Rel::Covers => {
                let w = entries[i].1;
                cover = match q {
                    Exponent::Infinity => cover.max(w),
                    Exponent::Finite(qv) => cover + w.powf(qv),
                };
            }
            Rel::Finer => finer.push(i),
        }
    }
    if finer.is_empty() {
        if cover > 0.0 {
            let g_pow_p = match q {
                Exponent::Infinity => cover.powf(p),
                Exponent::Finite(qv) => cover.powf(p / qv),
            };
            let depth: u32 = rl.iter().sum();
            acc.add(g_pow_p * (-(depth as f64)).exp2());
        }
        return;
    }
    let ax = (0..rl.len())
        .find(|&l| finer.iter().any(|&i| entries[i].0.level()[l] > rl[l]))
        .expect("finer entry must exceed the box level on some axis");
    rl[ax] += 1;
    rp[ax] *= 2;
    descend(entries, finer.clone(), rl, rp, cover, p, q, acc);
    rp[ax] += 1;
    descend(entries, finer, rl, rp, cover, p, q, acc);
    rp[ax] = (rp[ax] - 1) / 2;
    rl[ax] -= 1;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Exponent;

    fn e(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    fn field_1d(entries: &[(u32, u64, f64)]) -> CoeffField {
        let mut f = CoeffField::new(1).unwrap();
        for &(nu, m, v) in entries {
            f.insert(
                HyperIndex::new(vec![nu], vec![m]).unwrap(),
                Complex64::new(v, 0.0),
            )
            .unwrap();
        }
        f
    }

    #[test]
    fn unit_atom_has_unit_norms() {
        let f = field_1d(&[(0, 0, 1.0)]);
        for t in [0.0, 0.7, 1.5] {
            for p in [1.0, 2.0, 4.0, f64::INFINITY] {
                for q in [1.0, 2.0, f64::INFINITY] {
                    assert_eq!(bnorm(&f, t, e(p), e(q)), 1.0, "t={t} p={p} q={q}");
                }
                if p.is_finite() {
                    for q in [1.0, 2.0, p, f64::INFINITY] {
                        let v = fnorm(&f, t, e(p), e(q)).unwrap();
                        assert!((v - 1.0).abs() < 1e-14, "t={t} p={p} q={q}: {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn two_cell_level_matches_the_closed_forms() {
        let (a, b) = (0.6_f64, -2.5_f64);
        let f = field_1d(&[(1, 0, a), (1, 1, b)]);
        for p in [1.0, 2.0, 3.0] {
            let want_b = 2.0_f64.powf(-1.0 / p) * (a.abs().powf(p) + b.abs().powf(p)).powf(1.0 / p);
            assert!((bnorm(&f, 0.0, e(p), e(p)) - want_b).abs() < 1e-13);
            let want_f = ((a.abs().powf(p) + b.abs().powf(p)) / 2.0).powf(1.0 / p);
            for q in [2.0, p] {
                let got = fnorm(&f, 0.0, e(p), e(q)).unwrap();
                assert!((got - want_f).abs() < 1e-13, "p={p} q={q}: {got} vs {want_f}");
            }
            assert!((want_b - want_f).abs() < 1e-13);
        }
    }

    #[test]
    fn overlapping_levels_integrate_exactly() {
        // Constant 1 on [0,1) plus 1 on [0,1/2): the function is 2 on the
        // left half and 1 on the right half under q = 1.
        let f = field_1d(&[(0, 0, 1.0), (1, 0, 1.0)]);
        let got = fnorm(&f, 0.0, e(1.0), e(1.0)).unwrap();
        assert!((got - 1.5).abs() < 1e-15);
        // q = infinity: max of the two indicators, so 1 everywhere.
        let got = fnorm(&f, 0.0, e(1.0), Exponent::INF).unwrap();
        assert!((got - 1.0).abs() < 1e-15);
        // p = 2, q = 1: integral of (2 chi_left + chi_right)^2 = (4 + 1)/2.
        let got = fnorm(&f, 0.0, e(2.0), e(1.0)).unwrap();
        assert!((got - (2.5_f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn smoothness_weight_scales_levels() {
        let f = field_1d(&[(2, 3, 1.0)]);
        let t = 1.5;
        // Single entry at level 2: bnorm = 2^{2(t - 1/p)}.
        assert!((bnorm(&f, t, e(2.0), e(7.0)) - 2.0_f64.powf(2.0 * (t - 0.5))).abs() < 1e-12);
        // fnorm = 2^{2t} * vol^{1/p} = 2^{2t} * 2^{-2/p}.
        let got = fnorm(&f, t, e(4.0), e(2.0)).unwrap();
        assert!((got - 2.0_f64.powf(2.0 * t - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn infinite_p_rejected_on_the_f_scale() {
        let f = field_1d(&[(0, 0, 1.0)]);
        let err = fnorm(&f, 0.0, Exponent::INF, e(2.0)).unwrap_err();
        assert!(err.to_string().contains("f-scale requires p < \u{221e}"));
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let f = CoeffField::new(2).unwrap();
        assert_eq!(bnorm(&f, 1.0, e(2.0), e(1.0)), 0.0);
        assert_eq!(fnorm(&f, 1.0, e(2.0), e(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn integration_guards_depth_and_dimension() {
        let deep = field_1d(&[(11, 0, 1.0)]);
        assert!(fnorm(&deep, 0.0, e(1.0), e(2.0)).is_err());
        // Same field, p == q: exempt from the cap.
        assert!(fnorm(&deep, 0.0, e(2.0), e(2.0)).is_ok());

        let mut wide = CoeffField::new(4).unwrap();
        wide.insert(
            HyperIndex::new(vec![0; 4], vec![0; 4]).unwrap(),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        assert!(fnorm(&wide, 0.0, e(1.0), e(2.0)).is_err());
        assert!(fnorm(&wide, 0.0, e(2.0), e(2.0)).is_ok());
    }
}
