//! Parameter bundles for the function-space experiments.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::exponent::Exponent;

/// Width of the guard band around every strict inequality that selects a
/// regime. Values inside the band are rejected rather than silently
/// classified, because the asymptotic formulas on the two sides genuinely
/// differ.
pub const BOUNDARY_GUARD: f64 = 1e-9;

/// Smoothness/integrability parameters of an embedding
/// `S^t_{p1} -> L_{p2}` over a `d`-dimensional domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub d: u32,
    pub t: f64,
    pub p1: Exponent,
    pub p2: Exponent,
    pub q: Exponent,
}

impl ParamSet {
    pub fn new(d: u32, t: f64, p1: Exponent, p2: Exponent, q: Exponent) -> Result<ParamSet> {
        if d == 0 {
            return Err(CoreError::invalid("dimension d must be >= 1"));
        }
        if !t.is_finite() {
            return Err(CoreError::invalid(format!(
                "smoothness t must be finite, got {t}"
            )));
        }
        Ok(ParamSet { d, t, p1, p2, q })
    }

    /// `(1/p1 - 1/p2)_+`, the integrability penalty for the embedding.
    pub fn recip_gap_plus(&self) -> f64 {
        (self.p1.recip() - self.p2.recip()).max(0.0)
    }

    /// Margin of the isotropic compactness condition `t/d > (1/p1 - 1/p2)_+`.
    pub fn isotropic_margin(&self) -> f64 {
        self.t / self.d as f64 - self.recip_gap_plus()
    }

    /// Margin of the mixed-smoothness compactness condition
    /// `t > (1/p1 - 1/p2)_+`.
    pub fn mixed_margin(&self) -> f64 {
        self.t - self.recip_gap_plus()
    }

    /// Strict isotropic compactness with the guard band: a margin inside the
    /// band is an error, not a verdict.
    pub fn isotropic_compact(&self) -> Result<bool> {
        band_check(
            self.isotropic_margin(),
            "t/d vs (1/p1 - 1/p2)_+ (isotropic compactness)",
        )
    }

    /// Strict mixed compactness with the guard band.
    pub fn mixed_compact(&self) -> Result<bool> {
        band_check(
            self.mixed_margin(),
            "t vs (1/p1 - 1/p2)_+ (mixed compactness)",
        )
    }
}

/// Evaluates a strict inequality given its margin, rejecting margins inside
/// the guard band.
pub fn band_check(margin: f64, what: &str) -> Result<bool> {
    if margin.abs() <= BOUNDARY_GUARD {
        return Err(CoreError::boundary(format!(
            "{what}: margin {margin:e} is inside the guard band {BOUNDARY_GUARD:e}"
        )));
    }
    Ok(margin > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn compactness_verdicts() {
        // t/d = 0.75 > 1/1 - 1/2 = 0.5
        let ps = ParamSet::new(2, 1.5, e(1.0), e(2.0), e(1.0)).unwrap();
        assert!(ps.isotropic_compact().unwrap());
        assert!(ps.mixed_compact().unwrap());

        // t/d = 0.2 < 0.5: embedding not compact in the isotropic scale.
        let ps = ParamSet::new(2, 0.4, e(1.0), e(2.0), e(1.0)).unwrap();
        assert!(!ps.isotropic_compact().unwrap());
    }

    #[test]
    fn boundary_is_an_error_not_a_verdict() {
        // t/d exactly equals 1/p1 - 1/p2 = 0.5.
        let ps = ParamSet::new(2, 1.0, e(1.0), e(2.0), e(1.0)).unwrap();
        assert!(matches!(
            ps.isotropic_compact(),
            Err(CoreError::Boundary(_))
        ));
    }

    #[test]
    fn no_penalty_when_target_is_coarser() {
        let ps = ParamSet::new(1, 0.1, e(4.0), e(2.0), e(2.0)).unwrap();
        assert_eq!(ps.recip_gap_plus(), 0.0);
        assert!(ps.isotropic_compact().unwrap());
    }

    #[test]
    fn rejects_degenerate_dimension() {
        assert!(ParamSet::new(0, 1.0, e(2.0), e(2.0), e(2.0)).is_err());
    }
}
