//! Medians and bootstrap standard errors for replication summaries.

use rand::Rng;

use crate::scalar::Scalar;

/// Resamples used for every bootstrap standard error in the crate.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Median of `values`; NaN when empty.
pub fn median<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::nan();
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / T::lit(2.0)
    }
}

/// Nonparametric bootstrap standard error of the median.
pub fn bootstrap_median_se<T: Scalar, R: Rng + ?Sized>(values: &[T], resamples: usize, rng: &mut R) -> T {
    let n = values.len();
    if n < 2 || resamples < 2 {
        return T::zero();
    }
    let mut buf = vec![T::zero(); n];
    let meds: Vec<f64> = (0..resamples)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = values[rng.random_range(0..n)];
            }
            median(&buf).as_f64()
        })
        .collect();
    let mean = meds.iter().sum::<f64>() / resamples as f64;
    let var = meds.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    T::lit(var.sqrt())
}

pub fn mean<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::from_usize_lossy(values.len())
}
