//! Estimator fits and the loss identities around them.

pub mod biasing;
pub mod cd;
pub mod equivalence;
pub mod fit;
pub mod penalty;

pub use biasing::{BiasingFactor, BiasingParam};
pub use cd::{quadratic_l1, soft_threshold, CdOptions, CdOutcome};
pub use fit::{
    fit, fit_enet, fit_gen_llasso, fit_lasso, fit_liu, fit_llasso, fit_ols, fit_ridge, FitResult, Problem,
};
pub use penalty::{EstimatorKind, PenaltySpec};
