//! Width estimators for explicit finite-dimensional operators.
//!
//! Five width families are computed: Bernstein, approximation, Kolmogorov,
//! Gelfand and Weyl numbers. On Hilbert pairs all five collapse to singular
//! values and are returned exact. Away from that case each family keeps its
//! defining variational shape: an outer search over candidate subspaces,
//! approximants or contractions, and an inner extremization solved by the
//! shared multistart engine. Every estimate carries an explicit bound
//! direction; consumers must never treat a heuristic value as two-sided.

mod approx;
mod bernstein;
mod candidates;
mod checks;
mod gelfand;
mod inner;
mod kolmogorov;
mod weyl;

pub use checks::{
    check_bern_gelfand_duality, check_pietsch, check_pukhov, sandwich_profile, DualityReport,
    PietschReport, SandwichRow, DUALITY_DIMENSION_CAP, DUALITY_TOLERANCE, SANDWICH_SLACK,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exponent::Exponent;
use crate::opnorm::{identity_norm, operator_norm, OptimBudget};

/// An explicit operator `matrix: l_src^{m_in} -> l_tgt^{m_out}`.
#[derive(Debug, Clone)]
pub struct FiniteOperator {
    pub matrix: DMatrix<f64>,
    pub src: Exponent,
    pub tgt: Exponent,
}

impl FiniteOperator {
    pub fn new(matrix: DMatrix<f64>, src: Exponent, tgt: Exponent) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(invalid("operator needs at least one row and one column"));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(invalid("operator entries must be finite"));
        }
        Ok(FiniteOperator { matrix, src, tgt })
    }

    /// The embedding `id: l_p1^m -> l_p2^m`.
    pub fn identity_of(m: usize, p1: Exponent, p2: Exponent) -> Result<Self> {
        FiniteOperator::new(DMatrix::identity(m, m), p1, p2)
    }

    pub fn diagonal(entries: &[f64], src: Exponent, tgt: Exponent) -> Result<Self> {
        FiniteOperator::new(
            DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(entries)),
            src,
            tgt,
        )
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_identity(&self) -> bool {
        self.rows() == self.cols()
            && self
                .matrix
                .iter()
                .enumerate()
                .all(|(k, v)| *v == if k % (self.rows() + 1) == 0 { 1.0 } else { 0.0 })
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .matrix
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Numerical rank at relative tolerance 1e-10.
    pub fn rank(&self) -> usize {
        let sv = self.singular_values();
        let top = sv.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        sv.iter().filter(|s| **s > 1e-10 * top).count()
    }
}

/// A full-column-rank basis of a source-space subspace.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    columns: DMatrix<f64>,
}

impl SubspaceBasis {
    /// Validates full column rank: after normalizing each column, the
    /// smallest singular value must exceed 1e-8.
    pub fn new(columns: DMatrix<f64>) -> Result<Self> {
        if columns.ncols() == 0 || columns.nrows() < columns.ncols() {
            return Err(invalid("subspace basis needs 1 <= n <= m columns"));
        }
        let mut normed = columns.clone();
        for j in 0..normed.ncols() {
            let nrm = normed.column(j).norm();
            if nrm < 1e-300 {
                return Err(invalid("subspace basis has a zero column"));
            }
            for i in 0..normed.nrows() {
                normed[(i, j)] /= nrm;
            }
        }
        let smin = normed
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if smin <= 1e-8 {
            return Err(invalid("subspace basis is numerically rank deficient"));
        }
        Ok(SubspaceBasis { columns })
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WidthKind {
    Bernstein,
    Approximation,
    Kolmogorov,
    Gelfand,
    Weyl,
}

impl WidthKind {
    pub const ALL: [WidthKind; 5] = [
        WidthKind::Bernstein,
        WidthKind::Approximation,
        WidthKind::Kolmogorov,
        WidthKind::Gelfand,
        WidthKind::Weyl,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            WidthKind::Bernstein => "bernstein",
            WidthKind::Approximation => "approximation",
            WidthKind::Kolmogorov => "kolmogorov",
            WidthKind::Gelfand => "gelfand",
            WidthKind::Weyl => "weyl",
        }
    }
}

impl std::fmt::Display for WidthKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for WidthKind {
    type Err = crate::error::CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bernstein" | "b" => Ok(WidthKind::Bernstein),
            "approximation" | "approx" | "a" => Ok(WidthKind::Approximation),
            "kolmogorov" | "d" => Ok(WidthKind::Kolmogorov),
            "gelfand" | "c" => Ok(WidthKind::Gelfand),
            "weyl" | "x" => Ok(WidthKind::Weyl),
            other => Err(invalid(format!("unknown width kind `{other}`"))),
        }
    }
}

/// How to read a width estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerBound,
    UpperBound,
    Exact,
    Heuristic,
}

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::LowerBound => "lower_bound",
            Direction::UpperBound => "upper_bound",
            Direction::Exact => "exact",
            Direction::Heuristic => "heuristic",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Direction {
    type Err = crate::error::CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lower_bound" => Ok(Direction::LowerBound),
            "upper_bound" => Ok(Direction::UpperBound),
            "exact" => Ok(Direction::Exact),
            "heuristic" => Ok(Direction::Heuristic),
            other => Err(invalid(format!("unknown bound direction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub restarts: u32,
    pub seed: u64,
    /// The extremal source-space vector, when the search produced one.
    pub witness: Option<Vec<f64>>,
    pub converged: bool,
    /// Set by the monotone post-processing when a raw value was lowered.
    pub clamped: bool,
    /// Candidate family that produced the reported value.
    pub family: Option<String>,
}

impl Diagnostics {
    fn exact() -> Self {
        Diagnostics {
            restarts: 0,
            seed: 0,
            witness: None,
            converged: true,
            clamped: false,
            family: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WidthEstimate {
    pub kind: WidthKind,
    pub n: usize,
    pub value: f64,
    pub direction: Direction,
    pub diagnostics: Diagnostics,
}

impl WidthEstimate {
    fn exact(kind: WidthKind, n: usize, value: f64) -> Self {
        WidthEstimate {
            kind,
            n,
            value,
            direction: Direction::Exact,
            diagnostics: Diagnostics::exact(),
        }
    }
}

pub(crate) struct SearchOutcome {
    pub value: f64,
    pub witness: Option<Vec<f64>>,
    pub converged: bool,
    pub family: String,
}

/// Closed-form width of the embedding `id: l_p1^m -> l_p2^m`, when one is
/// known; `None` otherwise.
///
/// Covered: `n = 1` (the operator norm, all kinds); `p1 = p2` for the
/// Bernstein, approximation, Kolmogorov and Gelfand numbers (all equal 1 by
/// the norm sandwich; the Weyl numbers genuinely decay on such identities,
/// e.g. like n^{-1/2} on l_1, so no constant closed form exists for them
/// unless p1 = p2 = 2); the Hilbert case (all kinds 1); and the Bernstein
/// number at full index n = m.
pub fn exact_identity_width(
    kind: WidthKind,
    m: usize,
    n: usize,
    p1: Exponent,
    p2: Exponent,
) -> Option<f64> {
    if m == 0 || n == 0 || n > m {
        return None;
    }
    if n == 1 {
        return Some(identity_norm(m, p1, p2));
    }
    let hilbert = p1 == Exponent::Finite(2.0) && p2 == Exponent::Finite(2.0);
    if p1 == p2 && (kind != WidthKind::Weyl || hilbert) {
        return Some(1.0);
    }
    if kind == WidthKind::Bernstein && n == m {
        // Minimal norm ratio over the whole space: at the constant vector for
        // p1 <= p2 (value m^{1/p2 - 1/p1}), at a coordinate vector otherwise.
        let gap = p2.recip() - p1.recip();
        return Some(if gap <= 0.0 { (m as f64).powf(gap) } else { 1.0 });
    }
    None
}

/// Estimates the `n`-th width of the given kind, using closed forms whenever
/// one applies and the search machinery otherwise.
pub fn width(
    op: &FiniteOperator,
    kind: WidthKind,
    n: usize,
    budget: &OptimBudget,
) -> Result<WidthEstimate> {
    budget.validate()?;
    if n == 0 {
        return Err(invalid("width index must be >= 1"));
    }
    if kind == WidthKind::Bernstein && n > op.cols() {
        return Err(invalid(format!(
            "index exceeds dimension: n = {n} but the source space has dimension {}",
            op.cols()
        )));
    }

    let hilbert = op.src == Exponent::Finite(2.0) && op.tgt == Exponent::Finite(2.0);

    // Rank property: every width vanishes beyond the rank.
    let rank = op.rank();
    if n > rank {
        return Ok(WidthEstimate::exact(kind, n, 0.0));
    }

    if hilbert {
        let sv = op.singular_values();
        let value = sv.get(n - 1).copied().unwrap_or(0.0);
        return Ok(WidthEstimate::exact(kind, n, value));
    }

    if op.is_identity() {
        if let Some(value) = exact_identity_width(kind, op.rows(), n, op.src, op.tgt) {
            return Ok(WidthEstimate::exact(kind, n, value));
        }
    }

    if n == 1 {
        // Every width family starts at the operator norm.
        let est = operator_norm(&op.matrix, op.src, op.tgt, budget)?;
        return Ok(WidthEstimate {
            kind,
            n,
            value: est.value,
            direction: if est.certified {
                Direction::Exact
            } else {
                Direction::LowerBound
            },
            diagnostics: Diagnostics {
                restarts: budget.restarts,
                seed: budget.seed,
                witness: est.witness,
                converged: est.converged,
                clamped: false,
                family: Some("operator-norm".into()),
            },
        });
    }

    // A Hilbert source makes the Weyl number coincide with the approximation
    // number (take A = identity; the reverse inequality is the ideal
    // property), so delegate.
    if kind == WidthKind::Weyl && op.src == Exponent::Finite(2.0) {
        let inner = width(op, WidthKind::Approximation, n, budget)?;
        return Ok(WidthEstimate {
            kind,
            n,
            ..inner
        });
    }

    search_width(op, kind, n, budget)
}

/// Runs the search estimator for the given kind even where a closed form
/// exists. Used to cross-validate the search machinery against certified
/// values; `width` is the entry point for everything else.
pub fn search_width(
    op: &FiniteOperator,
    kind: WidthKind,
    n: usize,
    budget: &OptimBudget,
) -> Result<WidthEstimate> {
    budget.validate()?;
    if n == 0 {
        return Err(invalid("width index must be >= 1"));
    }
    if kind == WidthKind::Bernstein && n > op.cols() {
        return Err(invalid("index exceeds dimension"));
    }
    let (outcome, direction) = match kind {
        WidthKind::Bernstein => (bernstein::search(op, n, budget)?, Direction::LowerBound),
        WidthKind::Approximation => (approx::search(op, n, budget)?, Direction::UpperBound),
        WidthKind::Kolmogorov => (kolmogorov::search(op, n, budget)?, Direction::UpperBound),
        WidthKind::Gelfand => (gelfand::search(op, n, budget)?, Direction::UpperBound),
        WidthKind::Weyl => {
            let dir = if op.tgt == Exponent::Finite(2.0) {
                Direction::LowerBound
            } else {
                Direction::Heuristic
            };
            (weyl::search(op, n, budget)?, dir)
        }
    };
    Ok(WidthEstimate {
        kind,
        n,
        value: outcome.value,
        direction,
        diagnostics: Diagnostics {
            restarts: budget.restarts,
            seed: budget.seed,
            witness: outcome.witness,
            converged: outcome.converged,
            clamped: false,
            family: Some(outcome.family),
        },
    })
}

/// Widths for `n = 1..=n_max` with the monotone post-processing applied:
/// values are clamped to be nonincreasing, and estimates whose raw value
/// exceeded the running minimum by more than 1e-9 are flagged.
pub fn width_profile(
    op: &FiniteOperator,
    kind: WidthKind,
    n_max: usize,
    budget: &OptimBudget,
) -> Result<Vec<WidthEstimate>> {
    let mut out = Vec::with_capacity(n_max);
    let mut running = f64::INFINITY;
    for n in 1..=n_max {
        let mut est = width(op, kind, n, budget)?;
        if est.value > running + 1e-9 {
            est.diagnostics.clamped = true;
        }
        if est.value > running {
            est.value = running;
        }
        running = est.value;
        out.push(est);
    }
    Ok(out)
}
