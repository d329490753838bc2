//! Simulation designs, train/validation/test evaluation and the replication
//! engine.

pub mod bench;
pub mod design;
pub mod metrics;

pub use bench::{
    consistency_harness, run_benchmark, BenchReport, ConsistencyRow, DesignReport, EstimatorSummary, RepOutcome,
};
pub use design::{design_example, generate, generate_rep, Covariance, SimDesign, SplitData};
pub use metrics::{mse_beta, mse_y};
