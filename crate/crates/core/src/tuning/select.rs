use std::fmt;

use ndarray::{Array1, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::grid::Grid;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, PenaltySpec, Problem};
use crate::scalar::Scalar;
use crate::seed::SeedPlan;
use crate::stats::{bootstrap_median_se, median, BOOTSTRAP_RESAMPLES};

/// Candidate values for every tuning parameter.
///
/// `lambda` and `lambda2` default to data-derived grids: the LASSO grid below
/// `lambda_max` of the data being tuned on, and the ridge `k` grid divided by
/// that data's `n` (the elastic-net ridge term is on the `1/n` scale).
#[derive(Clone, Debug)]
pub struct TuningGrids<T> {
    pub lambda: Option<Grid<T>>,
    pub lambda2: Option<Grid<T>>,
    pub k: Grid<T>,
    pub d: Grid<T>,
}

impl<T: Scalar> Default for TuningGrids<T> {
    fn default() -> Self {
        TuningGrids {
            lambda: None,
            lambda2: None,
            k: Grid::default_k(),
            d: Grid::default_d(),
        }
    }
}

/// Grids with every data-derived default filled in.
#[derive(Clone, Debug)]
pub struct ResolvedGrids<T> {
    pub lambda: Grid<T>,
    pub lambda2: Grid<T>,
    pub k: Grid<T>,
    pub d: Grid<T>,
}

impl<T: Scalar> TuningGrids<T> {
    pub fn resolve(&self, problem: &Problem<T>) -> Result<ResolvedGrids<T>> {
        let lambda = match &self.lambda {
            Some(g) => g.clone(),
            None => Grid::default_lambda(problem.lambda_max())?,
        };
        let lambda2 = match &self.lambda2 {
            Some(g) => g.clone(),
            None => self.k.scaled(T::from_usize_lossy(problem.n()).recip())?,
        };
        let inf = T::infinity();
        lambda.check_range("lambda", T::zero(), inf)?;
        lambda2.check_range("lambda2", T::zero(), inf)?;
        self.k.check_range("k", T::zero(), inf)?;
        self.d.check_range("d", T::zero(), T::one())?;
        Ok(ResolvedGrids {
            lambda,
            lambda2,
            k: self.k.clone(),
            d: self.d.clone(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    ValidationMse,
    KfoldCvMse,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::ValidationMse => "validation_mse",
            Criterion::KfoldCvMse => "kfold_cv_mse",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SelectionReport<T> {
    pub chosen: PenaltySpec<T>,
    pub chosen_value: T,
    /// Every evaluated grid point with its criterion, strongest
    /// regularization first.
    pub criterion_values: Vec<(PenaltySpec<T>, T)>,
    pub criterion: Criterion,
}

fn descending<T: Scalar>(g: &Grid<T>) -> impl Iterator<Item = T> + '_ {
    g.values().iter().rev().copied()
}

/// Grid points for `kind`, ordered from strongest to weakest regularization:
/// larger `lambda` first, then larger `k` / `lambda2`, then smaller `d`.
pub fn candidates<T: Scalar>(kind: EstimatorKind, grids: &ResolvedGrids<T>) -> Result<Vec<PenaltySpec<T>>> {
    let out = match kind {
        EstimatorKind::Ols => vec![PenaltySpec::Ols],
        EstimatorKind::Ridge => descending(&grids.k).map(|k| PenaltySpec::Ridge { k }).collect(),
        EstimatorKind::Liu => grids.d.values().iter().map(|&d| PenaltySpec::Liu { d }).collect(),
        EstimatorKind::Lasso => descending(&grids.lambda).map(|lambda| PenaltySpec::Lasso { lambda }).collect(),
        EstimatorKind::LLasso => descending(&grids.lambda)
            .flat_map(|lambda| grids.d.values().iter().map(move |&d| PenaltySpec::LLasso { lambda, d }))
            .collect(),
        EstimatorKind::ENet => descending(&grids.lambda)
            .flat_map(|lambda1| descending(&grids.lambda2).map(move |lambda2| PenaltySpec::ENet { lambda1, lambda2 }))
            .collect(),
        EstimatorKind::GenLLasso => {
            return Err(Error::Inapplicable("grid search over a coefficient-wise D is not supported".into()))
        }
    };
    Ok(out)
}

/// Coefficients for every candidate of [`candidates`], in the same order.
///
/// Paths are warm-started from the largest `lambda`; the Liu-type estimators
/// reuse one `(C + I)^{-1}` solve per base fit across the whole `d` grid.
pub fn fit_candidates<T: Scalar>(
    problem: &Problem<T>,
    kind: EstimatorKind,
    grids: &ResolvedGrids<T>,
) -> Result<Vec<Array1<T>>> {
    let lambdas: Vec<T> = descending(&grids.lambda).collect();
    match kind {
        EstimatorKind::Ols => Ok(vec![problem.ols()?.beta]),
        EstimatorKind::Ridge => descending(&grids.k).map(|k| Ok(problem.ridge(k)?.beta)).collect(),
        EstimatorKind::Liu => {
            let ols = problem.ols()?.beta;
            let dir = problem.unit_ridge_solve(ols.view())?;
            Ok(grids.d.values().iter().map(|&d| Problem::rescale(&ols, &dir, d)).collect())
        }
        EstimatorKind::Lasso => Ok(problem.lasso_path(&lambdas)?.into_iter().map(|f| f.beta).collect()),
        EstimatorKind::LLasso => {
            let path = problem.lasso_path(&lambdas)?;
            let mut out = Vec::with_capacity(path.len() * grids.d.len());
            for fit in path {
                let dir = problem.unit_ridge_solve(fit.beta.view())?;
                out.extend(grids.d.values().iter().map(|&d| Problem::rescale(&fit.beta, &dir, d)));
            }
            Ok(out)
        }
        EstimatorKind::ENet => {
            let l2s: Vec<T> = descending(&grids.lambda2).collect();
            let mut out = vec![Array1::zeros(0); lambdas.len() * l2s.len()];
            for (i2, &l2) in l2s.iter().enumerate() {
                for (i1, fit) in problem.enet_path(&lambdas, l2)?.into_iter().enumerate() {
                    out[i1 * l2s.len() + i2] = fit.beta;
                }
            }
            Ok(out)
        }
        EstimatorKind::GenLLasso => candidates(kind, grids).map(|_| Vec::new()),
    }
}

/// `mean((y - X beta)^2)` for centered `y` and standardized `X`.
pub fn prediction_mse<T: Scalar>(x: ArrayView2<T>, y: ArrayView1<T>, beta: &Array1<T>) -> T {
    let r = &y - &x.dot(beta);
    r.dot(&r) / T::from_usize_lossy(y.len())
}

/// Index of the first minimum, ignoring NaN.
fn argmin_first<T: Scalar>(values: &[T]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|b| v < values[b]) {
            best = Some(i);
        }
    }
    best
}

fn report<T: Scalar>(cands: Vec<PenaltySpec<T>>, values: Vec<T>, criterion: Criterion) -> Result<SelectionReport<T>> {
    let i = argmin_first(&values).ok_or_else(|| Error::Grid("no finite criterion value".into()))?;
    Ok(SelectionReport {
        chosen: cands[i].clone(),
        chosen_value: values[i],
        criterion_values: cands.into_iter().zip(values).collect(),
        criterion,
    })
}

/// Validation-set selection for a problem already built on the training data.
pub fn select_on_problem<T: Scalar>(
    problem: &Problem<T>,
    valid_x: ArrayView2<T>,
    valid_y: ArrayView1<T>,
    kind: EstimatorKind,
    grids: &TuningGrids<T>,
) -> Result<SelectionReport<T>> {
    let resolved = grids.resolve(problem)?;
    let cands = candidates(kind, &resolved)?;
    let betas = fit_candidates(problem, kind, &resolved)?;
    let values = betas.iter().map(|b| prediction_mse(valid_x, valid_y, b)).collect();
    report(cands, values, Criterion::ValidationMse)
}

/// Fits every grid point on `train` and scores it by mean squared prediction
/// error on `valid`. Both must be standardized with the training statistics.
pub fn select_by_validation<T: Scalar>(
    train: &Dataset<T>,
    valid: &Dataset<T>,
    kind: EstimatorKind,
    grids: &TuningGrids<T>,
) -> Result<SelectionReport<T>> {
    if !train.standardized || !valid.standardized {
        return Err(Error::NotStandardized);
    }
    if train.p() != valid.p() {
        return Err(Error::Shape(format!("train has {} columns, valid has {}", train.p(), valid.p())));
    }
    if train.x_means != valid.x_means || train.x_scales != valid.x_scales || train.y_mean != valid.y_mean {
        return Err(Error::Shape("valid must be standardized with the training statistics".into()));
    }
    let problem = Problem::new(train);
    select_on_problem(&problem, valid.x.view(), valid.y.view(), kind, grids)
}

#[derive(Clone, Debug)]
pub struct CvReport<T> {
    /// Selection by the criterion averaged over repeats.
    pub selection: SelectionReport<T>,
    /// Per repeat, the smallest fold-averaged MSE over the grid.
    pub repeat_mse: Vec<T>,
    pub median_mse: T,
    /// Bootstrap standard error of `median_mse`.
    pub se_median: T,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
}

/// Fold labels `0..folds` for `n` rows in a seeded random order, sizes
/// differing by at most one.
pub fn fold_assignment(n: usize, folds: usize, plan: &SeedPlan, repeat: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut plan.rng(repeat, "cv-folds"));
    let mut label = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        label[row] = pos % folds;
    }
    label
}

/// Fold-averaged MSE of every candidate for one random partition.
fn one_repeat<T: Scalar>(
    ds: &Dataset<T>,
    kind: EstimatorKind,
    grids: &ResolvedGrids<T>,
    folds: usize,
    plan: &SeedPlan,
    repeat: u64,
) -> Result<Vec<T>> {
    let labels = fold_assignment(ds.n(), folds, plan, repeat);
    let mut sums: Option<Vec<T>> = None;
    for f in 0..folds {
        let train_idx: Vec<usize> = (0..ds.n()).filter(|&i| labels[i] != f).collect();
        let held_idx: Vec<usize> = (0..ds.n()).filter(|&i| labels[i] == f).collect();
        let train = ds.select_rows(&train_idx)?.standardize()?;
        let held_x = train.scale_rows(ds.x.select(Axis(0), &held_idx).view());
        let held_y = ds.y.select(Axis(0), &held_idx).mapv(|v| v - train.y_mean);
        let problem = Problem::new(&train);
        let betas = fit_candidates(&problem, kind, grids)?;
        let losses: Vec<T> = betas.iter().map(|b| prediction_mse(held_x.view(), held_y.view(), b)).collect();
        match sums.as_mut() {
            None => sums = Some(losses),
            Some(s) => s.iter_mut().zip(losses).for_each(|(a, b)| *a = *a + b),
        }
    }
    let k = T::from_usize_lossy(folds);
    Ok(sums.expect("folds >= 2").into_iter().map(|v| v / k).collect())
}

/// Repeated K-fold cross-validation on raw data. Each fold is standardized
/// with its own training statistics. Grids that default to data-derived
/// values are resolved once on the full standardized data so every fold
/// scores the same candidates.
pub fn kfold_cv<T: Scalar>(
    ds: &Dataset<T>,
    kind: EstimatorKind,
    grids: &TuningGrids<T>,
    folds: usize,
    repeats: usize,
    seed: u64,
) -> Result<CvReport<T>> {
    if ds.standardized {
        return Err(Error::AlreadyStandardized);
    }
    if folds < 2 || folds > ds.n() {
        return Err(Error::Folds { k: folds, n: ds.n() });
    }
    if repeats == 0 {
        return Err(Error::parameter("repeats", 0.0, "[1, inf)"));
    }
    let full = Problem::new(&ds.standardize()?);
    let resolved = grids.resolve(&full)?;
    let cands = candidates(kind, &resolved)?;
    let plan = SeedPlan::new(seed);
    let per_repeat: Vec<Vec<T>> = (0..repeats as u64)
        .into_par_iter()
        .map(|r| one_repeat(ds, kind, &resolved, folds, &plan, r))
        .collect::<Result<_>>()?;

    let repeats_t = T::from_usize_lossy(repeats);
    let averaged: Vec<T> = (0..cands.len())
        .map(|g| per_repeat.iter().map(|cv| cv[g]).sum::<T>() / repeats_t)
        .collect();
    let repeat_mse: Vec<T> = per_repeat
        .iter()
        .map(|cv| argmin_first(cv).map_or(T::nan(), |i| cv[i]))
        .collect();
    let median_mse = median(&repeat_mse);
    let mut rng = plan.rng(0, &format!("cv-bootstrap-{}", kind.label()));
    let se_median = bootstrap_median_se(&repeat_mse, BOOTSTRAP_RESAMPLES, &mut rng);
    Ok(CvReport {
        selection: report(cands, averaged, Criterion::KfoldCvMse)?,
        repeat_mse,
        median_mse,
        se_median,
        folds,
        repeats,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn split(rng: &mut ChaCha8Rng, n: usize, p: usize, signal: f64) -> (Dataset<f64>, Dataset<f64>) {
        let draw = |rng: &mut ChaCha8Rng, m: usize| {
            let x = Array2::from_shape_fn((m, p), |_| rng.sample::<f64, _>(StandardNormal));
            let y = Array1::from_shape_fn(m, |i| signal * x[[i, 0]] + rng.sample::<f64, _>(StandardNormal));
            Dataset::from_arrays(x, y).unwrap()
        };
        let train = draw(rng, n).standardize().unwrap();
        let valid = draw(rng, n).standardize_with(&train).unwrap();
        (train, valid)
    }

    #[test]
    fn singleton_grid_is_chosen() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (train, valid) = split(&mut rng, 30, 4, 1.0);
        let grids = TuningGrids { k: Grid::single(0.7).unwrap(), ..TuningGrids::default() };
        let rep = select_by_validation(&train, &valid, EstimatorKind::Ridge, &grids).unwrap();
        assert_eq!(rep.chosen, PenaltySpec::Ridge { k: 0.7 });
        assert_eq!(rep.criterion_values.len(), 1);
    }

    #[test]
    fn chosen_attains_recorded_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (train, valid) = split(&mut rng, 30, 5, 1.0);
        for kind in EstimatorKind::BENCHMARK {
            let rep = select_by_validation(&train, &valid, kind, &TuningGrids::default()).unwrap();
            let min = rep.criterion_values.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
            assert_eq!(rep.chosen_value, min, "{kind}");
            let first = rep.criterion_values.iter().find(|(_, v)| *v == min).unwrap();
            assert_eq!(first.0, rep.chosen);
        }
    }

    #[test]
    fn ties_go_to_stronger_regularization() {
        // y is orthogonal to every column: all LASSO fits are zero and tie
        let x = array![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
        let train = Dataset::from_arrays(x.clone(), array![1.0, 1.0, -1.0, -1.0]).unwrap().standardize().unwrap();
        let valid = Dataset::from_arrays(x, array![0.5, 0.1, 0.2, 0.3]).unwrap().standardize_with(&train).unwrap();
        let grids = TuningGrids {
            lambda: Some(Grid::from_values(vec![0.1, 0.5, 0.3], super::super::GridScale::Linear).unwrap()),
            d: Grid::from_values(vec![1.0, 0.2, 0.6], super::super::GridScale::Linear).unwrap(),
            ..TuningGrids::default()
        };
        let rep = select_by_validation(&train, &valid, EstimatorKind::LLasso, &grids).unwrap();
        assert_eq!(rep.chosen, PenaltySpec::LLasso { lambda: 0.5, d: 0.2 });
    }

    #[test]
    fn rejects_foreign_standardization() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (train, _) = split(&mut rng, 20, 3, 1.0);
        let (other, _) = split(&mut rng, 20, 3, 1.0);
        assert!(select_by_validation(&train, &other, EstimatorKind::Ridge, &TuningGrids::default()).is_err());
        assert!(matches!(
            select_by_validation(&train, &train, EstimatorKind::GenLLasso, &TuningGrids::default()),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn candidate_fits_match_direct_fits() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (train, _) = split(&mut rng, 30, 4, 2.0);
        let problem = Problem::new(&train);
        let grids = TuningGrids {
            lambda: Some(Grid::log_spaced(0.01, 1.0, 4).unwrap()),
            lambda2: Some(Grid::log_spaced(0.01, 1.0, 3).unwrap()),
            k: Grid::log_spaced(0.1, 10.0, 3).unwrap(),
            d: Grid::linear(0.0, 1.0, 0.5).unwrap(),
        }
        .resolve(&problem)
        .unwrap();
        for kind in EstimatorKind::BENCHMARK {
            let cands = candidates(kind, &grids).unwrap();
            let betas = fit_candidates(&problem, kind, &grids).unwrap();
            assert_eq!(cands.len(), betas.len());
            for (spec, beta) in cands.iter().zip(&betas) {
                let direct = problem.fit(spec).unwrap().beta;
                let gap = (&direct - beta).mapv(f64::abs).fold(0.0, |a: f64, &b| a.max(b));
                assert!(gap < 1e-6, "{spec}: {gap}");
            }
        }
    }

    #[test]
    fn loo_on_exact_line_is_zero() {
        let ds = Dataset::from_arrays(array![[1.0f64], [2.0], [3.0]], array![2.0, 4.0, 6.0]).unwrap();
        let rep = kfold_cv(&ds, EstimatorKind::Ols, &TuningGrids::default(), 3, 1, 5).unwrap();
        assert!(rep.median_mse.abs() < 1e-20);
        assert!(matches!(
            kfold_cv(&ds, EstimatorKind::Ols, &TuningGrids::default(), 4, 1, 5),
            Err(Error::Folds { k: 4, n: 3 })
        ));
    }

    #[test]
    fn folds_are_balanced_and_seeded() {
        let plan = SeedPlan::new(9);
        let a = fold_assignment(23, 5, &plan, 0);
        assert_eq!(a, fold_assignment(23, 5, &plan, 0));
        assert_ne!(a, fold_assignment(23, 5, &plan, 1));
        for f in 0..5 {
            let c = a.iter().filter(|&&l| l == f).count();
            assert!(c == 4 || c == 5);
        }
    }

    #[test]
    fn kfold_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = Array2::from_shape_fn((40, 3), |_| rng.sample::<f64, _>(StandardNormal));
        let y = Array1::from_shape_fn(40, |i| x[[i, 1]] + rng.sample::<f64, _>(StandardNormal));
        let ds = Dataset::from_arrays(x, y).unwrap();
        let a = kfold_cv(&ds, EstimatorKind::Lasso, &TuningGrids::default(), 5, 3, 11).unwrap();
        let b = kfold_cv(&ds, EstimatorKind::Lasso, &TuningGrids::default(), 5, 3, 11).unwrap();
        assert_eq!(a.repeat_mse, b.repeat_mse);
        assert_eq!(a.selection.chosen, b.selection.chosen);
        assert_eq!(a.se_median, b.se_median);
    }
}
