use ndarray::Array1;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::norm_l1;
use crate::scalar::Scalar;

const ZERO_ANCHOR: f64 = 1e-10;

/// Outcome of the closed-form biasing-parameter rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DChoice<T> {
    pub d: T,
    /// Discriminant `Q`; negative values trigger the l1-proximity fallback.
    pub discriminant: T,
    /// True when the closed form was unusable and [`choose_d_l1`] was used.
    pub fallback: bool,
}

/// `||y - X beta||^2 + lambda1 ||beta||_1 + lambda2 ||beta||^2`.
pub fn enet_loss<T: Scalar>(ds: &Dataset<T>, beta: &Array1<T>, lambda1: T, lambda2: T) -> T {
    let r = &ds.y - &ds.x.dot(beta);
    r.dot(&r) + lambda1 * norm_l1(beta.view()) + lambda2 * beta.dot(beta)
}

/// `max(0, 1 - sqrt(q) / (lambda2 * bb))`, clamped to `[0, 1]`, for `q >= 0`.
pub fn d_from_discriminant<T: Scalar>(q: T, lambda2: T, bb: T) -> T {
    (T::one() - q.sqrt() / (lambda2 * bb)).max(T::zero()).min(T::one())
}

/// `Q = lambda2^2 (b'b)^2 - lambda2 b'b L(beta_enet)` with `b = beta_ols` and
/// `L` the unnormalized elastic-net loss, then `d = max(0, 1 - sqrt(Q) / (lambda2 b'b))`.
///
/// For `Q < 0` the result comes from [`choose_d_l1`] with the OLS fit as
/// anchor and the elastic-net fit as target, and `fallback` is set.
pub fn choose_d_closed_form<T: Scalar>(
    beta_ols: &Array1<T>,
    beta_enet: &Array1<T>,
    ds: &Dataset<T>,
    lambda1: T,
    lambda2: T,
) -> Result<DChoice<T>> {
    if !(lambda2 > T::zero()) || !lambda2.is_finite() {
        return Err(Error::parameter("lambda2", lambda2.as_f64(), "(0, inf)"));
    }
    if !(lambda1 >= T::zero()) {
        return Err(Error::parameter("lambda1", lambda1.as_f64(), "[0, inf)"));
    }
    if beta_ols.len() != ds.p() || beta_enet.len() != ds.p() {
        return Err(Error::Shape("coefficient vectors must have one entry per predictor".into()));
    }
    let bb = beta_ols.dot(beta_ols);
    if !(bb.sqrt() > T::lit(ZERO_ANCHOR)) {
        return Err(Error::NullOlsFit);
    }
    let loss = enet_loss(ds, beta_enet, lambda1, lambda2);
    let q = lambda2 * lambda2 * bb * bb - lambda2 * bb * loss;
    if q < T::zero() {
        return Ok(DChoice {
            d: choose_d_l1(beta_ols, beta_enet)?,
            discriminant: q,
            fallback: true,
        });
    }
    Ok(DChoice {
        d: d_from_discriminant(q, lambda2, bb),
        discriminant: q,
        fallback: false,
    })
}

/// `argmin_{d in [0, 1]} sum_j |d anchor_j - target_j|`.
///
/// The objective is `sum_j |anchor_j| |d - r_j|` plus a constant, with
/// `r_j = target_j / anchor_j`, so the minimizer is the weighted median of the
/// `r_j` (lower one on ties) projected onto `[0, 1]`.
pub fn choose_d_l1<T: Scalar>(anchor: &Array1<T>, target: &Array1<T>) -> Result<T> {
    if anchor.len() != target.len() {
        return Err(Error::Shape(format!("anchor has {} entries, target {}", anchor.len(), target.len())));
    }
    let tiny = T::lit(ZERO_ANCHOR);
    let mut pts: Vec<(T, T)> = anchor
        .iter()
        .zip(target.iter())
        .filter(|(a, _)| a.abs() > tiny)
        .map(|(&a, &t)| (t / a, a.abs()))
        .collect();
    if pts.is_empty() {
        return Err(Error::ZeroAnchor);
    }
    pts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let total: T = pts.iter().map(|p| p.1).sum();
    let half = total / T::lit(2.0);
    let mut acc = T::zero();
    let mut med = pts[pts.len() - 1].0;
    for &(r, w) in &pts {
        acc = acc + w;
        if acc >= half {
            med = r;
            break;
        }
    }
    Ok(med.max(T::zero()).min(T::one()))
}
