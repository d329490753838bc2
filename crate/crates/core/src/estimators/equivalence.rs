//! The unnormalized penalized loss with a Liu-type ridge term, its augmented
//! LASSO and quadratic reformulations, the reweighted closed-form
//! approximation, and a sandwich covariance for the augmented fit.
//!
//! Everything here works with `||y - X beta||^2` (no `1/n`), unlike the solvers
//! in [`super::fit`].

use ndarray::{concatenate, s, Array1, Array2, Axis};

use super::cd::{quadratic_l1, CdOptions};
use crate::data::{gram, Dataset};
use crate::error::{Error, Result};
use crate::linalg::{norm_inf, norm_l1, Cholesky};
use crate::scalar::Scalar;

/// Entries of the reweighting anchor at or below this magnitude are treated as
/// zero: their coordinate is dropped from the solve and returned as zero.
pub const KILL_THRESHOLD: f64 = 1e-10;

/// `||y - X beta||^2 + lambda2 ||d beta_ols - beta||^2 + lambda1 ||beta||_1`.
pub fn naive_loss<T: Scalar>(
    ds: &Dataset<T>,
    beta: &Array1<T>,
    lambda1: T,
    lambda2: T,
    d: T,
    beta_ols: &Array1<T>,
) -> T {
    let resid = &ds.y - &ds.x.dot(beta);
    let gap = beta_ols * d - beta;
    resid.dot(&resid) + lambda2 * gap.dot(&gap) + lambda1 * norm_l1(beta.view())
}

/// Augmented design for the `lambda2` ridge term:
/// `Y* = (y', 0')'`, `X* = (1 + lambda2)^{-1/2} (X', sqrt(lambda2) I)'`.
pub fn prop1_augment<T: Scalar>(ds: &Dataset<T>, lambda2: T) -> Result<(Array1<T>, Array2<T>)> {
    if !(lambda2 >= T::zero()) {
        return Err(Error::parameter("lambda2", lambda2.as_f64(), "[0, inf)"));
    }
    let p = ds.p();
    let scale = (T::one() + lambda2).sqrt().recip();
    let lower = Array2::<T>::eye(p) * lambda2.sqrt();
    let x_star = concatenate(Axis(0), &[ds.x.view(), lower.view()])
        .expect("column counts agree")
        .mapv(|v| v * scale);
    let y_star = concatenate(Axis(0), &[ds.y.view(), Array1::<T>::zeros(p).view()]).expect("1-d concat");
    Ok((y_star, x_star))
}

/// `beta' ((X'X + lambda2 I) / (1 + lambda2)) beta - 2 y'X beta + lambda1 ||d beta_ols - beta||_1`.
pub fn prop2_objective<T: Scalar>(
    ds: &Dataset<T>,
    beta: &Array1<T>,
    lambda1: T,
    lambda2: T,
    d: T,
    beta_ols: &Array1<T>,
) -> T {
    let xb = ds.x.dot(beta);
    let quad = (xb.dot(&xb) + lambda2 * beta.dot(beta)) / (T::one() + lambda2);
    let lin = T::lit(2.0) * ds.y.dot(&xb);
    let gap = beta_ols * d - beta;
    quad - lin + lambda1 * norm_l1(gap.view())
}

/// `(C + lambda2 I + lambda1 W^-)^{-1} (X'y + d lambda2 liu_anchor)` with
/// `W = diag(|weight_anchor|)`, solved on the coordinates whose anchor exceeds
/// [`KILL_THRESHOLD`]; the rest are zero.
fn reweighted_step<T: Scalar>(
    c: &Array2<T>,
    xty: &Array1<T>,
    lambda1: T,
    lambda2: T,
    d: T,
    weight_anchor: &Array1<T>,
    liu_anchor: &Array1<T>,
) -> Result<Array1<T>> {
    let p = xty.len();
    let kill = T::lit(KILL_THRESHOLD);
    let active: Vec<usize> = (0..p).filter(|&j| weight_anchor[j].abs() > kill).collect();
    let mut out = Array1::zeros(p);
    if active.is_empty() {
        return Ok(out);
    }
    let m = active.len();
    let mut a = Array2::<T>::zeros((m, m));
    let mut rhs = Array1::<T>::zeros(m);
    for (ia, &i) in active.iter().enumerate() {
        for (ja, &j) in active.iter().enumerate() {
            a[[ia, ja]] = c[[i, j]];
        }
        a[[ia, ia]] = a[[ia, ia]] + lambda2 + lambda1 / weight_anchor[i].abs();
        rhs[ia] = xty[i] + d * lambda2 * liu_anchor[i];
    }
    let sol = Cholesky::factor(a.view())
        .map_err(|e| match e {
            Error::NotPositiveDefinite { pivot } => Error::Singular { pivot: active[pivot] },
            other => other,
        })?
        .solve(rhs.view());
    for (ia, &i) in active.iter().enumerate() {
        out[i] = sol[ia];
    }
    Ok(out)
}

/// Closed-form approximation to the minimizer of [`naive_loss`] with the
/// l1 penalty replaced by `sum beta_j^2 / |beta_ref_j|`:
/// `(C + lambda2 I + lambda1 W^-)^{-1}(X'y + d lambda2 beta_ref)`,
/// `W = diag(|beta_ref_j|)`.
pub fn approx_penalized_closed_form<T: Scalar>(
    ds: &Dataset<T>,
    lambda1: T,
    lambda2: T,
    d: T,
    beta_ref: &Array1<T>,
) -> Result<Array1<T>> {
    if beta_ref.len() != ds.p() {
        return Err(Error::Shape(format!("beta_ref has {} entries, expected {}", beta_ref.len(), ds.p())));
    }
    if beta_ref.iter().any(|v| !v.is_finite()) {
        return Err(Error::Shape("beta_ref has non-finite entries".into()));
    }
    let g = gram(ds);
    reweighted_step(&g.c, &g.xty, lambda1, lambda2, d, beta_ref, beta_ref)
}

#[derive(Clone, Debug)]
pub struct FixedPoint<T> {
    pub beta: Array1<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Iterates the reweighted closed form, refreshing `W` from the current iterate
/// while the Liu anchor stays at `beta_ols`. Starts from `beta_ols`.
///
/// A limit point `b` with support `S` satisfies
/// `C_S b - X_S'y + lambda2 (b - d beta_ols)_S + lambda1 sgn(b_S) = 0`,
/// i.e. stationarity of [`naive_loss`] with l1 weight `2 lambda1`.
pub fn approx_penalized_fixed_point<T: Scalar>(
    ds: &Dataset<T>,
    lambda1: T,
    lambda2: T,
    d: T,
    beta_ols: &Array1<T>,
    max_iter: usize,
    tol: T,
) -> Result<FixedPoint<T>> {
    let g = gram(ds);
    let mut beta = beta_ols.clone();
    for it in 1..=max_iter {
        let next = reweighted_step(&g.c, &g.xty, lambda1, lambda2, d, &beta, beta_ols)?;
        let change = norm_inf((&next - &beta).view());
        beta = next;
        if change < tol {
            return Ok(FixedPoint { beta, iterations: it, converged: true });
        }
    }
    Ok(FixedPoint { beta, iterations: max_iter, converged: false })
}

/// Exact minimizer of [`naive_loss`] by coordinate descent.
pub fn minimize_naive_loss<T: Scalar>(
    ds: &Dataset<T>,
    lambda1: T,
    lambda2: T,
    d: T,
    beta_ols: &Array1<T>,
    opts: &CdOptions<T>,
) -> Array1<T> {
    let g = gram(ds);
    let mut a = g.c.clone();
    for j in 0..a.nrows() {
        a[[j, j]] = a[[j, j]] + lambda2;
    }
    let b = &g.xty + &(beta_ols * (d * lambda2));
    quadratic_l1(a.view(), b.view(), lambda1, None, opts).beta
}

/// Sandwich covariance `(C* + W*)^{-1} C* (C* + W*)^{-1} sigma2 / (1 + lambda2)`
/// for the augmented LASSO fit `b`, where `C* = X*'X*`, `e = Y* - X* b` and
/// `C* + W* = X*'(I + e e' / (beta_norm1 ||X*'e||_inf)) X*`.
pub fn osborne_covariance<T: Scalar>(
    ds: &Dataset<T>,
    lambda2: T,
    b: &Array1<T>,
    beta_norm1: T,
    sigma2: T,
) -> Result<Array2<T>> {
    let (y_star, x_star) = prop1_augment(ds, lambda2)?;
    if b.len() != ds.p() {
        return Err(Error::Shape(format!("b has {} entries, expected {}", b.len(), ds.p())));
    }
    let e = &y_star - &x_star.dot(b);
    let xte = x_star.t().dot(&e);
    let xte_inf = norm_inf(xte.view());
    if !(xte_inf > T::lit(1e-12)) || !(beta_norm1 > T::zero()) {
        return Err(Error::DegenerateResidual);
    }
    let c_star = x_star.t().dot(&x_star);
    let denom = beta_norm1 * xte_inf;
    let p = ds.p();
    let mut m = c_star.clone();
    for i in 0..p {
        for j in 0..p {
            m[[i, j]] = m[[i, j]] + xte[i] * xte[j] / denom;
        }
    }
    let chol = Cholesky::factor(m.view())?;
    let left = chol.solve_matrix(c_star.view());
    let left_t = left.t().to_owned();
    let mut cov = chol.solve_matrix(left_t.view());
    let scale = sigma2 / (T::one() + lambda2);
    cov.mapv_inplace(|v| v * scale);
    for i in 0..p {
        for j in (i + 1)..p {
            let avg = (cov[[i, j]] + cov[[j, i]]) / T::lit(2.0);
            cov[[i, j]] = avg;
            cov[[j, i]] = avg;
        }
    }
    Ok(cov)
}

/// Slice helper used by tests: the top `n` rows of `X*`.
pub fn augmented_top<T: Scalar>(x_star: &Array2<T>, n: usize) -> Array2<T> {
    x_star.slice(s![..n, ..]).to_owned()
}
