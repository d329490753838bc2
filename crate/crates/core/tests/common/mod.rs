#![allow(dead_code)]

use llasso::Dataset;
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Raw dataset with a sparse linear signal plus uniform noise.
pub fn raw_dataset(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Dataset<f64> {
    let x = Array2::from_shape_fn((n, p), |_| rng.random_range(-2.0..2.0));
    let beta: Array1<f64> = Array1::from_shape_fn(p, |j| if j % 2 == 0 { rng.random_range(-3.0..3.0) } else { 0.0 });
    let y = Array1::from_shape_fn(n, |i| x.row(i).dot(&beta) + rng.random_range(-1.0..1.0) + 5.0);
    Dataset::from_arrays(x, y).unwrap()
}

pub fn std_dataset(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Dataset<f64> {
    raw_dataset(rng, n, p).standardize().unwrap()
}

/// Columns share a latent factor, so `X'X` is badly conditioned.
pub fn collinear_dataset(rng: &mut ChaCha8Rng, n: usize, p: usize, noise: f64) -> Dataset<f64> {
    let z: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x = Array2::from_shape_fn((n, p), |(i, j)| z[i] * (1.0 + 0.1 * j as f64) + noise * rng.random_range(-1.0..1.0));
    let y = Array1::from_shape_fn(n, |i| 2.0 * z[i] + 0.5 * rng.random_range(-1.0..1.0));
    Dataset::from_arrays(x, y).unwrap().standardize().unwrap()
}

pub fn max_abs_diff(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn lasso_objective(ds: &Dataset<f64>, beta: &Array1<f64>, lambda: f64) -> f64 {
    let r = &ds.y - &ds.x.dot(beta);
    r.dot(&r) / ds.n() as f64 + lambda * beta.iter().map(|v| v.abs()).sum::<f64>()
}

/// Exact LASSO minimizer of `(1/n)||y - Xb||^2 + lambda ||b||_1` by trying every
/// sign pattern in `{-1, 0, 1}^p`: each pattern fixes a quadratic problem on its
/// support, solved with nalgebra, and the candidate is kept only when the signs
/// it produces agree with the pattern.
pub fn lasso_by_enumeration(ds: &Dataset<f64>, lambda: f64) -> (Array1<f64>, f64) {
    let (n, p) = (ds.n(), ds.p());
    let nf = n as f64;
    let x = nalgebra::DMatrix::from_fn(n, p, |i, j| ds.x[[i, j]]);
    let y = nalgebra::DVector::from_fn(n, |i, _| ds.y[i]);
    let c = x.transpose() * &x / nf;
    let xty = x.transpose() * &y / nf;

    let mut best = Array1::zeros(p);
    let mut best_obj = lasso_objective(ds, &best, lambda);
    for code in 0..3usize.pow(p as u32) {
        let mut signs = vec![0i32; p];
        let mut rest = code;
        for s in signs.iter_mut() {
            *s = (rest % 3) as i32 - 1;
            rest /= 3;
        }
        let support: Vec<usize> = (0..p).filter(|&j| signs[j] != 0).collect();
        if support.is_empty() {
            continue;
        }
        let m = support.len();
        let a = nalgebra::DMatrix::from_fn(m, m, |i, j| c[(support[i], support[j])]);
        let rhs = nalgebra::DVector::from_fn(m, |i, _| xty[support[i]] - lambda / 2.0 * signs[support[i]] as f64);
        let Some(sol) = a.lu().solve(&rhs) else { continue };
        if support.iter().enumerate().any(|(i, &j)| sol[i] * signs[j] as f64 <= 0.0) {
            continue;
        }
        let mut beta = Array1::zeros(p);
        for (i, &j) in support.iter().enumerate() {
            beta[j] = sol[i];
        }
        let obj = lasso_objective(ds, &beta, lambda);
        if obj < best_obj {
            best_obj = obj;
            best = beta;
        }
    }
    (best, best_obj)
}
