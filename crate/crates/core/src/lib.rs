//! Numerical laboratory for widths of finite-dimensional p-norm embeddings.
//!
//! The crate has three layers. The bottom layer computes norms and operator
//! norms on `l_p^n` spaces and provides the shared multistart optimization
//! engine. The middle layer estimates Bernstein, approximation, Kolmogorov,
//! Gelfand and Weyl numbers of explicit matrices, with certified directions
//! on every returned value, plus consistency checks tying the five numbers
//! together. The top layer works on hyperbolic-cross coefficient fields:
//! block norms, exact dyadic integration of piecewise-constant arrangements,
//! a level-dependent thresholding approximator, and the regime classifiers
//! and rate-fitting helpers used to compare measured decay against the
//! asymptotic tables.

pub mod error;
pub mod exponent;
pub mod pnorm;
pub mod params;

mod optim;
pub mod hypercross;
pub mod rates;
pub mod threshold;
pub mod opnorm;
pub mod widths;

pub use error::{CoreError, Result};
pub use exponent::Exponent;
pub use hypercross::{
    block_embedding_norm_probe, bnorm, enumerate_block, fnorm, BlockLayout, BlockProbe,
    CoeffField, HyperIndex,
};
pub use rates::{
    bernstein_rate_isotropic, bernstein_rate_mixed, fit_rate, nonlinear_width_rate,
    weyl_rate_isotropic, weyl_rate_mixed, FitResult, RateExponents, RateScale,
};
pub use threshold::{
    approx_error, choose_k, run_decay_experiment, soft_threshold, sparsify, theta,
    DecayGenerator, DecayRow, SparsifyStats, ThresholdSchedule,
};
pub use opnorm::{identity_norm, operator_norm, NormEstimate, OptimBudget};
pub use params::{ParamSet, BOUNDARY_GUARD};
pub use pnorm::{pnorm, pnorm_complex};
pub use widths::{
    check_bern_gelfand_duality, check_pietsch, check_pukhov, exact_identity_width, sandwich_profile,
    search_width, width, width_profile, Direction, DualityReport, FiniteOperator, PietschReport,
    SandwichRow, SubspaceBasis, WidthEstimate, WidthKind, DUALITY_DIMENSION_CAP, DUALITY_TOLERANCE,
    SANDWICH_SLACK,
};
