//! Risk calculations for the Liu-rescaled LASSO when `X'X = I`.
//!
//! In that design the estimator is `c_d * soft(z, lambda_o)` with
//! `c_d = (1 + d) / 2`. Everything is measured in noise units: `Delta_j` is
//! `beta_j / sigma` and draws are `Z_j ~ N(Delta_j, 1)`.

use ndarray::Array1;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use libm::erfc;

use crate::error::{Error, Result};
use crate::estimators::soft_threshold;
use crate::scalar::Scalar;
use crate::seed::SeedPlan;

/// Draws per independent Monte Carlo work unit.
const CHUNK: usize = 1 << 15;

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoConfig {
    /// Standardized means `beta_j / sigma`.
    pub delta: Vec<f64>,
    /// Threshold, half the LASSO `lambda`.
    pub lambda_o: f64,
    pub d: f64,
    pub sigma: f64,
    /// Level in `(0, 1/2]` for the universal-threshold bound.
    pub delta_bound: f64,
}

impl OrthoConfig {
    pub fn new(delta: Vec<f64>, lambda_o: f64, d: f64, sigma: f64, delta_bound: f64) -> Result<Self> {
        if delta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("Delta must be finite".into()));
        }
        if !(lambda_o >= 0.0) || !lambda_o.is_finite() {
            return Err(Error::parameter("lambda_o", lambda_o, "[0, inf)"));
        }
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::parameter("d", d, "[0, 1]"));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::parameter("sigma", sigma, "(0, inf)"));
        }
        if !(delta_bound > 0.0 && delta_bound <= 0.5) {
            return Err(Error::parameter("delta_bound", delta_bound, "(0, 1/2]"));
        }
        Ok(OrthoConfig { delta, lambda_o, d, sigma, delta_bound })
    }

    pub fn c_d(&self) -> f64 {
        (1.0 + self.d) / 2.0
    }

    pub fn p(&self) -> usize {
        self.delta.len()
    }
}

/// Standard normal CDF through `erfc`, accurate in both tails.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `c_d * sgn(z_j) (|z_j| - lambda_thr)^+` for every coordinate.
pub fn normalized_lasso<T: Scalar>(z: &Array1<T>, lambda_thr: T, d: T) -> Array1<T> {
    let c = (T::one() + d) / T::lit(2.0);
    z.mapv(|v| c * soft_threshold(v, lambda_thr))
}

/// Risk of `soft(Z, l)` for `Z ~ N(m, 1)`, summed over the coordinates.
fn soft_risk_term(l: f64, m: f64) -> f64 {
    1.0 + l * l + (m * m - 1.0 - l * l) * (norm_cdf(l - m) - norm_cdf(-l - m))
        - (l - m) * norm_pdf(l + m)
        - (l + m) * norm_pdf(l - m)
}

/// `c_d^2 * sum_j r(lambda_o, Delta_j)` with `r` the soft-threshold risk.
pub fn risk_closed_form(cfg: &OrthoConfig) -> f64 {
    let c = cfg.c_d();
    c * c * cfg.delta.iter().map(|&m| soft_risk_term(cfg.lambda_o, m)).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub mc_se: f64,
}

/// Sums of `f(draw)` and `f(draw)^2` over `n` draws, split into seeded chunks
/// so the result does not depend on the thread count.
fn mc_moments<F>(n_draws: usize, seed: u64, tag: &str, f: F) -> McEstimate
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    let plan = SeedPlan::new(seed);
    let chunks = n_draws.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = plan.rng(c as u64, tag);
            let len = CHUNK.min(n_draws - c * CHUNK);
            let (mut s, mut ss) = (0.0, 0.0);
            for _ in 0..len {
                let v = f(&mut rng);
                s += v;
                ss += v * v;
            }
            (s, ss)
        })
        .collect();
    let (s, ss) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = n_draws as f64;
    let mean = s / n;
    let var = ((ss - n * mean * mean) / (n - 1.0)).max(0.0);
    McEstimate { estimate: mean, mc_se: (var / n).sqrt() }
}

/// Monte Carlo estimate of `E sum_j (c_d soft(Z_j, lambda_o) - Delta_j)^2`.
pub fn mc_risk(cfg: &OrthoConfig, n_draws: usize, seed: u64) -> Result<McEstimate> {
    if n_draws < 10_000 {
        return Err(Error::parameter("n_draws", n_draws as f64, "[10000, inf)"));
    }
    let c = cfg.c_d();
    let l = cfg.lambda_o;
    Ok(mc_moments(n_draws, seed, "mc-risk", |rng| {
        cfg.delta
            .iter()
            .map(|&m| {
                let z = m + Distribution::<f64>::sample(&StandardNormal, rng);
                (c * soft_threshold(z, l) - m).powi(2)
            })
            .sum()
    }))
}

/// `2 sigma sqrt(2 log(1 / delta))`.
pub fn universal_lambda(sigma: f64, delta_bound: f64) -> f64 {
    2.0 * sigma * (2.0 * (1.0 / delta_bound).ln()).sqrt()
}

/// Per-coordinate upper bound on `E(sigma c_d soft(Z_j, lambda / 2 sigma) - Delta_j)^2`
/// at `lambda = universal_lambda(sigma, delta_bound)`.
pub fn prop4_bound(cfg: &OrthoConfig) -> Vec<f64> {
    let (s, c, delta) = (cfg.sigma, cfg.c_d(), cfg.delta_bound);
    let lam = universal_lambda(s, delta);
    let t = lam / (2.0 * s);
    let log_term = 1.0 + 2.0 * (1.0 / delta).ln();
    let sc = s * c;
    cfg.delta
        .iter()
        .map(|&m| {
            sc * sc * log_term * (delta + (m * m).min(1.0)) + (sc - 1.0).powi(2) * m * m
                - 2.0 * sc * (sc - 1.0) * m * t * (norm_cdf(t - m) - norm_cdf(t + m))
        })
        .collect()
}

/// Monte Carlo per-coordinate MSE of `sigma c_d soft(Z_j, lambda / 2 sigma)`
/// about `Delta_j` at the universal `lambda`, the quantity [`prop4_bound`]
/// bounds.
pub fn prop4_mc(cfg: &OrthoConfig, n_draws: usize, seed: u64) -> Result<Vec<McEstimate>> {
    if n_draws < 10_000 {
        return Err(Error::parameter("n_draws", n_draws as f64, "[10000, inf)"));
    }
    let sc = cfg.sigma * cfg.c_d();
    let t = universal_lambda(cfg.sigma, cfg.delta_bound) / (2.0 * cfg.sigma);
    Ok(cfg
        .delta
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let tag = format!("prop4-{j}");
            mc_moments(n_draws, seed, &tag, |rng| {
                let z = m + Distribution::<f64>::sample(&StandardNormal, rng);
                (sc * soft_threshold(z, t) - m).powi(2)
            })
        })
        .collect())
}
