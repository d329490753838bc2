//! Liu-type LASSO regression with OLS, ridge, Liu, LASSO and elastic-net
//! baselines, tuning by validation or K-fold CV, orthonormal-design risk
//! calculations and a simulation benchmark.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below name the common instantiations.

pub mod cli;
pub mod data;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod orthonormal;
pub mod scalar;
pub mod seed;
pub mod simbench;
pub mod stats;
pub mod tuning;

pub use data::{gram, load_csv, read_csv, Dataset, GramCache};
pub use error::{Error, Result};
pub use estimators::{EstimatorKind, FitResult, PenaltySpec, Problem};
pub use scalar::Scalar;
pub use seed::{SeedPlan, DEFAULT_SEED};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type FitResult64 = FitResult<f64>;
pub type FitResult32 = FitResult<f32>;
pub type Problem64 = Problem<f64>;
pub type Problem32 = Problem<f32>;
pub type PenaltySpec64 = PenaltySpec<f64>;
pub type PenaltySpec32 = PenaltySpec<f32>;
