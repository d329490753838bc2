use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// `(1/n_test) sum_i (x_i' beta - (y_mean_train + (x_i - x_mean_train)' beta_hat))^2`
/// over raw test rows `x_i`.
pub fn mse_y(
    x_test: ArrayView2<f64>,
    beta_hat: ArrayView1<f64>,
    x_mean_train: ArrayView1<f64>,
    y_mean_train: f64,
    beta_true: ArrayView1<f64>,
) -> Result<f64> {
    let p = x_test.ncols();
    if beta_hat.len() != p || x_mean_train.len() != p || beta_true.len() != p {
        return Err(Error::Shape("mse_y: every vector needs one entry per column".into()));
    }
    let shift = y_mean_train - x_mean_train.dot(&beta_hat);
    let r: Array1<f64> = x_test.dot(&beta_true) - x_test.dot(&beta_hat).mapv(|v| v + shift);
    Ok(r.dot(&r) / x_test.nrows() as f64)
}

/// `||beta_hat - beta||^2`.
pub fn mse_beta(beta_hat: ArrayView1<f64>, beta_true: ArrayView1<f64>) -> Result<f64> {
    if beta_hat.len() != beta_true.len() {
        return Err(Error::Shape(format!("{} vs {} coefficients", beta_hat.len(), beta_true.len())));
    }
    let d = &beta_hat - &beta_true;
    Ok(d.dot(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_predictor_has_zero_error() {
        let x = array![[1.0, 2.0], [0.5, -1.0], [3.0, 0.0]];
        let b = array![1.0, -2.0];
        let xm = array![0.2, 0.4];
        let ym = xm.dot(&b);
        assert!(mse_y(x.view(), b.view(), xm.view(), ym, b.view()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn null_model() {
        let x = array![[1.0, 0.0], [-1.0, 2.0]];
        let b = array![2.0, 1.0];
        let z = array![0.0, 0.0];
        let got = mse_y(x.view(), z.view(), z.view(), 0.0, b.view()).unwrap();
        assert_eq!(got, (4.0 + 0.0) / 2.0);
    }

    #[test]
    fn matches_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (n, p) = (17, 4);
        let x = Array2::from_shape_fn((n, p), |_| rng.random_range(-2.0..2.0));
        let bh = Array1::from_shape_fn(p, |_| rng.random_range(-2.0..2.0));
        let bt = Array1::from_shape_fn(p, |_| rng.random_range(-2.0..2.0));
        let xm = Array1::from_shape_fn(p, |_| rng.random_range(-1.0..1.0));
        let ym = 0.7;
        let mut acc = 0.0;
        for i in 0..n {
            let mut truth = 0.0;
            let mut pred = ym;
            for j in 0..p {
                truth += x[[i, j]] * bt[j];
                pred += (x[[i, j]] - xm[j]) * bh[j];
            }
            acc += (truth - pred) * (truth - pred);
        }
        let got = mse_y(x.view(), bh.view(), xm.view(), ym, bt.view()).unwrap();
        assert!((got - acc / n as f64).abs() < 1e-12);

        let mut sq = 0.0;
        for j in 0..p {
            sq += (bh[j] - bt[j]) * (bh[j] - bt[j]);
        }
        assert!((mse_beta(bh.view(), bt.view()).unwrap() - sq).abs() < 1e-12);
    }

    #[test]
    fn mse_beta_basics() {
        let b = array![1.0, 2.0, 3.0];
        assert_eq!(mse_beta(b.view(), b.view()).unwrap(), 0.0);
        assert_eq!(mse_beta(array![2.0, 2.0, 3.0].view(), b.view()).unwrap(), 1.0);
        assert!(mse_beta(array![1.0].view(), b.view()).is_err());
    }
}
