use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridScale {
    Log,
    Linear,
}

/// Strictly increasing, nonempty list of candidate values.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    values: Vec<T>,
    scale: GridScale,
}

impl<T: Scalar> Grid<T> {
    /// `count` points evenly spaced in `log` between `lo` and `hi` inclusive.
    pub fn log_spaced(lo: T, hi: T, count: usize) -> Result<Self> {
        if !(lo > T::zero() && hi >= lo && hi.is_finite()) || count == 0 {
            return Err(Error::Grid(format!("log grid needs 0 < lo <= hi and count > 0, got [{lo}, {hi}] x {count}")));
        }
        if count == 1 || lo == hi {
            return Ok(Grid { values: vec![hi], scale: GridScale::Log });
        }
        let (a, b) = (lo.ln(), hi.ln());
        let last = T::from_usize_lossy(count - 1);
        let mut values: Vec<T> = (0..count)
            .map(|i| (a + (b - a) * T::from_usize_lossy(i) / last).exp())
            .collect();
        values[0] = lo;
        values[count - 1] = hi;
        Self::from_values(values, GridScale::Log)
    }

    /// `lo, lo + step, ...` up to `hi`, with `hi` itself as the last point.
    pub fn linear(lo: T, hi: T, step: T) -> Result<Self> {
        if !(step > T::zero() && hi >= lo && lo.is_finite() && hi.is_finite()) {
            return Err(Error::Grid(format!("linear grid needs lo <= hi and step > 0, got [{lo}, {hi}] step {step}")));
        }
        let count = ((hi - lo) / step).round().to_usize().unwrap_or(0) + 1;
        let mut values: Vec<T> = (0..count).map(|i| lo + step * T::from_usize_lossy(i)).collect();
        let cut = hi - step / T::lit(2.0);
        values.retain(|&v| v < cut);
        values.push(hi);
        Self::from_values(values, GridScale::Linear)
    }

    /// Sorts and removes duplicates.
    pub fn from_values(mut values: Vec<T>, scale: GridScale) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Grid("empty grid".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite grid value {bad}")));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        values.dedup();
        Ok(Grid { values, scale })
    }

    pub fn single(v: T) -> Result<Self> {
        Self::from_values(vec![v], GridScale::Linear)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn scale(&self) -> GridScale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// Errors unless every value lies in `[lo, hi]`.
    pub fn check_range(&self, name: &'static str, lo: T, hi: T) -> Result<()> {
        match self.values.iter().find(|&&v| v < lo || v > hi) {
            Some(&v) => Err(Error::parameter(name, v.as_f64(), if hi.is_infinite() { "[0, inf)" } else { "[0, 1]" })),
            None => Ok(()),
        }
    }

    pub fn scaled(&self, factor: T) -> Result<Self> {
        Self::from_values(self.values.iter().map(|&v| v * factor).collect(), self.scale)
    }

    /// 50 log-spaced points from `lambda_max` down to `1e-4 * lambda_max`;
    /// the single point 0 when `lambda_max` is 0.
    pub fn default_lambda(lambda_max: T) -> Result<Self> {
        if lambda_max == T::zero() {
            return Self::single(T::zero());
        }
        Self::log_spaced(lambda_max * T::lit(1e-4), lambda_max, 50)
    }

    /// 25 log-spaced points in `[1e-4, 1e2]`.
    pub fn default_k() -> Self {
        Self::log_spaced(T::lit(1e-4), T::lit(1e2), 25).expect("valid constants")
    }

    /// `0, 0.01, ..., 1`.
    pub fn default_d() -> Self {
        let values = (0..=100).map(|i| T::lit(i as f64 / 100.0)).collect();
        Self::from_values(values, GridScale::Linear).expect("valid constants")
    }
}
