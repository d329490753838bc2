//! Tuning-parameter selection: grids, validation-set and repeated K-fold
//! search, and the two rules for the biasing parameter `d`.

pub mod choose_d;
pub mod grid;
pub mod select;

pub use choose_d::{choose_d_closed_form, choose_d_l1, d_from_discriminant, DChoice};
pub use grid::{Grid, GridScale};
pub use select::{
    candidates, fit_candidates, kfold_cv, select_by_validation, select_on_problem, Criterion, CvReport,
    ResolvedGrids, SelectionReport, TuningGrids,
};
