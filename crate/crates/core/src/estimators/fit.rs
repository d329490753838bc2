use std::sync::OnceLock;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use super::biasing::BiasingFactor;
use super::cd::{quadratic_l1, CdOptions};
use super::penalty::PenaltySpec;
use crate::data::{gram, Dataset, GramCache};
use crate::error::{Error, Result};
use crate::linalg::{add_diagonal, norm_l1, trace, Cholesky};
use crate::scalar::Scalar;

/// Coefficients of one fitted estimator on the standardized scale.
#[derive(Clone, Debug)]
pub struct FitResult<T> {
    pub beta: Array1<T>,
    /// Intercept of the centered model, i.e. the response mean.
    pub intercept: T,
    pub spec: PenaltySpec<T>,
    /// Coordinate-descent sweeps; 0 for closed-form estimators.
    pub iterations: usize,
    pub converged: bool,
    pub objective: T,
    pub x_means: Array1<T>,
    pub x_scales: Array1<T>,
}

impl<T: Scalar> FitResult<T> {
    /// Coefficients for raw (unscaled) covariates.
    pub fn coef_original(&self) -> Array1<T> {
        &self.beta / &self.x_scales
    }

    /// Intercept for raw covariates: `y_mean - x_means' coef_original`.
    pub fn intercept_original(&self) -> T {
        self.intercept - self.x_means.dot(&self.coef_original())
    }

    /// `y_mean + ((x - x_means) / x_scales)' beta` for each raw row.
    pub fn predict(&self, x_raw: ArrayView2<T>) -> Array1<T> {
        let coef = self.coef_original();
        let shift = self.x_means.dot(&coef);
        x_raw.dot(&coef).mapv(|v| v - shift + self.intercept)
    }

    /// Predictions for rows already on the standardized scale, without the
    /// intercept.
    pub fn predict_centered(&self, x_std: ArrayView2<T>) -> Array1<T> {
        x_std.dot(&self.beta)
    }
}

/// A standardized regression problem with its cross products cached.
///
/// All estimators are computed from `C = X'X`, `X'y` and `y'y`; the factor of
/// `C + I` shared by the Liu-type estimators is computed once on demand.
#[derive(Debug)]
pub struct Problem<T: Scalar> {
    gram: GramCache<T>,
    y_mean: T,
    x_means: Array1<T>,
    x_scales: Array1<T>,
    opts: CdOptions<T>,
    unit_ridge: OnceLock<Option<Cholesky<T>>>,
}

impl<T: Scalar> Problem<T> {
    pub fn new(ds: &Dataset<T>) -> Self {
        Self::from_gram(gram(ds), ds.y_mean, ds.x_means.clone(), ds.x_scales.clone())
    }

    pub fn from_gram(gram: GramCache<T>, y_mean: T, x_means: Array1<T>, x_scales: Array1<T>) -> Self {
        Problem {
            gram,
            y_mean,
            x_means,
            x_scales,
            opts: CdOptions::default(),
            unit_ridge: OnceLock::new(),
        }
    }

    pub fn with_options(mut self, opts: CdOptions<T>) -> Self {
        self.opts = opts;
        self
    }

    pub fn gram(&self) -> &GramCache<T> {
        &self.gram
    }

    pub fn options(&self) -> &CdOptions<T> {
        &self.opts
    }

    pub fn n(&self) -> usize {
        self.gram.n
    }

    pub fn p(&self) -> usize {
        self.gram.p()
    }

    fn n_t(&self) -> T {
        T::from_usize_lossy(self.gram.n)
    }

    fn result(&self, beta: Array1<T>, spec: PenaltySpec<T>, iterations: usize, converged: bool, objective: T) -> FitResult<T> {
        FitResult {
            beta,
            intercept: self.y_mean,
            spec,
            iterations,
            converged,
            objective,
            x_means: self.x_means.clone(),
            x_scales: self.x_scales.clone(),
        }
    }

    /// Smallest admissible Cholesky pivot for the unpenalized normal equations.
    fn singular_floor(&self) -> T {
        let p = T::from_usize_lossy(self.p());
        T::lit(1e-12) * trace(self.gram.c.view()) / p
    }

    /// `(1/n) ||y - X beta||^2`.
    pub fn mean_sse(&self, beta: &Array1<T>) -> T {
        self.gram.sse(beta) / self.n_t()
    }

    pub fn fit(&self, spec: &PenaltySpec<T>) -> Result<FitResult<T>> {
        match spec {
            PenaltySpec::Ols => self.ols(),
            PenaltySpec::Ridge { k } => self.ridge(*k),
            PenaltySpec::Liu { d } => self.liu(*d),
            PenaltySpec::Lasso { lambda } => self.lasso(*lambda),
            PenaltySpec::ENet { lambda1, lambda2 } => self.enet(*lambda1, *lambda2),
            PenaltySpec::LLasso { lambda, d } => self.llasso(*lambda, *d),
            PenaltySpec::GenLLasso { lambda, d } => self.gen_llasso(*lambda, d.clone()),
        }
    }

    pub fn ols(&self) -> Result<FitResult<T>> {
        let chol = Cholesky::factor_with_floor(self.gram.c.view(), self.singular_floor())?;
        let beta = chol.solve(self.gram.xty.view());
        let obj = self.mean_sse(&beta);
        Ok(self.result(beta, PenaltySpec::Ols, 0, true, obj))
    }

    /// `(C + k I)^{-1} X'y`. At `k = 0` this is exactly the OLS computation.
    pub fn ridge(&self, k: T) -> Result<FitResult<T>> {
        let spec = PenaltySpec::ridge(k)?;
        let a = add_diagonal(self.gram.c.view(), k);
        let floor = if k == T::zero() { self.singular_floor() } else { T::zero() };
        let chol = Cholesky::factor_with_floor(a.view(), floor)?;
        let beta = chol.solve(self.gram.xty.view());
        let obj = (self.gram.sse(&beta) + k * beta.dot(&beta)) / self.n_t();
        Ok(self.result(beta, spec, 0, true, obj))
    }

    fn unit_ridge(&self) -> Result<&Cholesky<T>> {
        self.unit_ridge
            .get_or_init(|| Cholesky::factor(add_diagonal(self.gram.c.view(), T::one()).view()).ok())
            .as_ref()
            .ok_or(Error::NotPositiveDefinite { pivot: 0 })
    }

    /// `(C + I)^{-1} v`.
    pub fn unit_ridge_solve(&self, v: ArrayView1<T>) -> Result<Array1<T>> {
        Ok(self.unit_ridge()?.solve(v))
    }

    /// Since `(C + I)^{-1}(C + d I) = I - (1 - d)(C + I)^{-1}`, the Liu-type
    /// rescaling of `beta` is `beta - (1 - d) * direction` with
    /// `direction = (C + I)^{-1} beta`. At `d = 1` this returns `beta` unchanged.
    pub fn rescale(beta: &Array1<T>, direction: &Array1<T>, d: T) -> Array1<T> {
        let shrink = T::one() - d;
        if shrink == T::zero() {
            return beta.clone();
        }
        beta - &(direction * shrink)
    }

    pub fn liu(&self, d: T) -> Result<FitResult<T>> {
        let spec = PenaltySpec::liu(d)?;
        let ols = self.ols()?;
        let dir = self.unit_ridge_solve(ols.beta.view())?;
        let beta = Self::rescale(&ols.beta, &dir, d);
        let obj = self.mean_sse(&beta);
        Ok(self.result(beta, spec, 0, true, obj))
    }

    pub fn lasso(&self, lambda: T) -> Result<FitResult<T>> {
        self.lasso_from(lambda, None)
    }

    /// LASSO started from `warm` (zero when `None`).
    pub fn lasso_from(&self, lambda: T, warm: Option<ArrayView1<T>>) -> Result<FitResult<T>> {
        let spec = PenaltySpec::lasso(lambda)?;
        let n = self.n_t();
        let a = self.gram.c.mapv(|v| v / n);
        let b = self.gram.xty.mapv(|v| v / n);
        let out = quadratic_l1(a.view(), b.view(), lambda, warm, &self.opts);
        let obj = self.mean_sse(&out.beta) + lambda * norm_l1(out.beta.view());
        Ok(self.result(out.beta, spec, out.sweeps, out.converged, obj))
    }

    /// `(2/n) ||X'y||_inf`: the smallest `lambda` with an all-zero LASSO fit.
    pub fn lambda_max(&self) -> T {
        let n = self.n_t();
        T::lit(2.0) * crate::linalg::norm_inf(self.gram.xty.view()) / n
    }

    /// Fits along `lambdas` in the given order, warm-starting each fit from the
    /// previous one. Pass the grid largest-first.
    pub fn lasso_path(&self, lambdas: &[T]) -> Result<Vec<FitResult<T>>> {
        let mut out: Vec<FitResult<T>> = Vec::with_capacity(lambdas.len());
        for &lam in lambdas {
            let warm = out.last().map(|f| f.beta.view());
            let fit = self.lasso_from(lam, warm)?;
            out.push(fit);
        }
        Ok(out)
    }

    pub fn enet(&self, lambda1: T, lambda2: T) -> Result<FitResult<T>> {
        self.enet_from(lambda1, lambda2, None)
    }

    pub fn enet_from(&self, lambda1: T, lambda2: T, warm: Option<ArrayView1<T>>) -> Result<FitResult<T>> {
        let spec = PenaltySpec::enet(lambda1, lambda2)?;
        let n = self.n_t();
        let mut a = self.gram.c.mapv(|v| v / n);
        for j in 0..a.nrows() {
            a[[j, j]] = a[[j, j]] + lambda2;
        }
        let b = self.gram.xty.mapv(|v| v / n);
        let out = quadratic_l1(a.view(), b.view(), lambda1, warm, &self.opts);
        let beta = out.beta;
        let obj = self.mean_sse(&beta) + lambda2 * beta.dot(&beta) + lambda1 * norm_l1(beta.view());
        Ok(self.result(beta, spec, out.sweeps, out.converged, obj))
    }

    /// Elastic net multiplied by `(1 + lambda2)`, the rescaled variant.
    pub fn enet_rescaled(&self, lambda1: T, lambda2: T) -> Result<FitResult<T>> {
        let mut fit = self.enet(lambda1, lambda2)?;
        fit.beta.mapv_inplace(|v| v * (T::one() + lambda2));
        Ok(fit)
    }

    /// `lambda1`-path of the elastic net at fixed `lambda2`, warm-started.
    pub fn enet_path(&self, lambda1s: &[T], lambda2: T) -> Result<Vec<FitResult<T>>> {
        let mut out: Vec<FitResult<T>> = Vec::with_capacity(lambda1s.len());
        for &lam in lambda1s {
            let warm = out.last().map(|f| f.beta.view());
            let fit = self.enet_from(lam, lambda2, warm)?;
            out.push(fit);
        }
        Ok(out)
    }

    /// `(C + I)^{-1}(C + d I)` applied to the LASSO fit at `lambda`.
    pub fn llasso(&self, lambda: T, d: T) -> Result<FitResult<T>> {
        PenaltySpec::llasso(lambda, d)?;
        let lasso = self.lasso(lambda)?;
        self.llasso_from_lasso(&lasso, d)
    }

    /// Rescales an existing LASSO fit.
    pub fn llasso_from_lasso(&self, lasso: &FitResult<T>, d: T) -> Result<FitResult<T>> {
        let lambda = match lasso.spec {
            PenaltySpec::Lasso { lambda } => lambda,
            _ => return Err(Error::Shape("llasso_from_lasso expects a LASSO fit".into())),
        };
        let spec = PenaltySpec::llasso(lambda, d)?;
        let dir = self.unit_ridge_solve(lasso.beta.view())?;
        let beta = Self::rescale(&lasso.beta, &dir, d);
        let obj = self.mean_sse(&beta) + lambda * norm_l1(beta.view());
        Ok(self.result(beta, spec, lasso.iterations, lasso.converged, obj))
    }

    /// `(C + I)^{-1}(C + diag(D))` applied to the LASSO fit at `lambda`.
    pub fn gen_llasso(&self, lambda: T, d: Array1<T>) -> Result<FitResult<T>> {
        if d.len() != self.p() {
            return Err(Error::Shape(format!("D has {} entries, expected {}", d.len(), self.p())));
        }
        let spec = PenaltySpec::gen_llasso(lambda, d.clone())?;
        let lasso = self.lasso(lambda)?;
        let shrunk: Array1<T> = lasso
            .beta
            .iter()
            .zip(d.iter())
            .map(|(&b, &dj)| (T::one() - dj) * b)
            .collect();
        let beta = if shrunk.iter().all(|&v| v == T::zero()) {
            lasso.beta.clone()
        } else {
            &lasso.beta - &self.unit_ridge_solve(shrunk.view())?
        };
        let obj = self.mean_sse(&beta) + lambda * norm_l1(beta.view());
        Ok(self.result(beta, spec, lasso.iterations, lasso.converged, obj))
    }

    pub fn biasing_factor(&self, d: T) -> Result<BiasingFactor<T>> {
        BiasingFactor::scalar(&self.gram.c, d)
    }

    /// Largest KKT violation of `(1/n) SSE + lambda2 ||b||^2 + lambda1 ||b||_1`
    /// at `beta`: zero coordinates need `|g_j| <= lambda1`, active ones need
    /// `g_j = lambda1 sgn(beta_j)`, with `g = (2/n) X'(y - X beta) - 2 lambda2 beta`.
    pub fn kkt_violation(&self, beta: &Array1<T>, lambda1: T, lambda2: T) -> T {
        let n = self.n_t();
        let two = T::lit(2.0);
        let resid_corr = &self.gram.xty - &self.gram.c.dot(beta);
        let mut worst = T::zero();
        for j in 0..beta.len() {
            let g = two * resid_corr[j] / n - two * lambda2 * beta[j];
            let v = if beta[j] == T::zero() {
                (g.abs() - lambda1).max(T::zero())
            } else {
                (g - lambda1 * beta[j].signum()).abs()
            };
            worst = worst.max(v);
        }
        worst
    }
}

pub fn fit_ols<T: Scalar>(ds: &Dataset<T>) -> Result<FitResult<T>> {
    Problem::new(ds).ols()
}

pub fn fit_ridge<T: Scalar>(ds: &Dataset<T>, k: T) -> Result<FitResult<T>> {
    Problem::new(ds).ridge(k)
}

pub fn fit_liu<T: Scalar>(ds: &Dataset<T>, d: T) -> Result<FitResult<T>> {
    Problem::new(ds).liu(d)
}

pub fn fit_lasso<T: Scalar>(ds: &Dataset<T>, lambda: T) -> Result<FitResult<T>> {
    Problem::new(ds).lasso(lambda)
}

pub fn fit_enet<T: Scalar>(ds: &Dataset<T>, lambda1: T, lambda2: T) -> Result<FitResult<T>> {
    Problem::new(ds).enet(lambda1, lambda2)
}

pub fn fit_llasso<T: Scalar>(ds: &Dataset<T>, lambda: T, d: T) -> Result<FitResult<T>> {
    Problem::new(ds).llasso(lambda, d)
}

pub fn fit_gen_llasso<T: Scalar>(ds: &Dataset<T>, lambda: T, d: Array1<T>) -> Result<FitResult<T>> {
    Problem::new(ds).gen_llasso(lambda, d)
}

pub fn fit<T: Scalar>(ds: &Dataset<T>, spec: &PenaltySpec<T>) -> Result<FitResult<T>> {
    Problem::new(ds).fit(spec)
}

/// `(C + s I)` as an owned matrix; handy in tests and diagnostics.
pub fn shifted_gram<T: Scalar>(ds: &Dataset<T>, s: T) -> Array2<T> {
    add_diagonal(gram(ds).c.view(), s)
}
