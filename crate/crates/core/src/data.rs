//! Design matrices, standardization, CSV ingestion and Gram products.

use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::linalg::symmetrize_from_upper;
use crate::scalar::Scalar;

/// Covariates and response, plus the statistics needed to map a model fitted
/// on the standardized scale back to the original one.
///
/// For raw data `x_means` is zero, `x_scales` is one and `y_mean` is zero.
#[derive(Clone, Debug)]
pub struct Dataset<T> {
    pub x: Array2<T>,
    pub y: Array1<T>,
    pub column_names: Vec<String>,
    pub standardized: bool,
    pub x_means: Array1<T>,
    pub x_scales: Array1<T>,
    pub y_mean: T,
}

impl<T: Scalar> Dataset<T> {
    /// Wraps raw data. Requires `n >= 2`, `p >= 1` and matching shapes.
    pub fn new(x: Array2<T>, y: Array1<T>, column_names: Vec<String>) -> Result<Self> {
        let (n, p) = x.dim();
        if y.len() != n {
            return Err(Error::Shape(format!("X has {n} rows but y has {}", y.len())));
        }
        if column_names.len() != p {
            return Err(Error::Shape(format!(
                "X has {p} columns but {} names were given",
                column_names.len()
            )));
        }
        if n < 2 {
            return Err(Error::TooFewRows(n));
        }
        if p == 0 {
            return Err(Error::NoPredictors);
        }
        Ok(Dataset {
            x,
            y,
            column_names,
            standardized: false,
            x_means: Array1::zeros(p),
            x_scales: Array1::ones(p),
            y_mean: T::zero(),
        })
    }

    /// Raw data with generated column names `x1..xp`.
    pub fn from_arrays(x: Array2<T>, y: Array1<T>) -> Result<Self> {
        let names = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
        Self::new(x, y, names)
    }

    /// Marks data as already on the modeling scale (for example an orthonormal
    /// design), with identity back-transformation.
    pub fn assume_standardized(x: Array2<T>, y: Array1<T>) -> Result<Self> {
        let mut ds = Self::from_arrays(x, y)?;
        ds.standardized = true;
        Ok(ds)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Centers and scales every column by its sample standard deviation
    /// (divisor `n - 1`) and centers `y`.
    pub fn standardize(&self) -> Result<Self> {
        if self.standardized {
            return Err(Error::AlreadyStandardized);
        }
        let n = T::from_usize_lossy(self.n());
        let x_means = self.x.mean_axis(Axis(0)).expect("n >= 2");
        let mut x_scales = Array1::<T>::zeros(self.p());
        for (j, col) in self.x.axis_iter(Axis(1)).enumerate() {
            let m = x_means[j];
            let ss: T = col.iter().map(|&v| (v - m) * (v - m)).sum();
            let sd = (ss / (n - T::one())).sqrt();
            if !(sd > T::zero()) || !sd.is_finite() {
                return Err(Error::ConstantColumn(self.column_names[j].clone()));
            }
            x_scales[j] = sd;
        }
        let y_mean = self.y.mean().expect("n >= 2");
        self.transform(x_means, x_scales, y_mean)
    }

    /// Applies the standardization recorded on `reference` (typically a
    /// training set) to this raw dataset.
    pub fn standardize_with(&self, reference: &Dataset<T>) -> Result<Self> {
        if self.standardized {
            return Err(Error::AlreadyStandardized);
        }
        if !reference.standardized {
            return Err(Error::NotStandardized);
        }
        if reference.p() != self.p() {
            return Err(Error::Shape(format!(
                "reference has {} columns, dataset has {}",
                reference.p(),
                self.p()
            )));
        }
        self.transform(
            reference.x_means.clone(),
            reference.x_scales.clone(),
            reference.y_mean,
        )
    }

    fn transform(&self, x_means: Array1<T>, x_scales: Array1<T>, y_mean: T) -> Result<Self> {
        let mut x = self.x.clone();
        for (j, mut col) in x.axis_iter_mut(Axis(1)).enumerate() {
            let (m, s) = (x_means[j], x_scales[j]);
            col.mapv_inplace(|v| (v - m) / s);
        }
        let y = self.y.mapv(|v| v - y_mean);
        Ok(Dataset {
            x,
            y,
            column_names: self.column_names.clone(),
            standardized: true,
            x_means,
            x_scales,
            y_mean,
        })
    }

    /// Rows `idx` of the raw data. Only valid on unstandardized datasets.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        if self.standardized {
            return Err(Error::AlreadyStandardized);
        }
        let x = self.x.select(Axis(0), idx);
        let y = self.y.select(Axis(0), idx);
        Self::new(x, y, self.column_names.clone())
    }

    /// Maps raw covariate rows onto this dataset's standardized scale.
    pub fn scale_rows(&self, x_raw: ArrayView2<T>) -> Array2<T> {
        let mut x = x_raw.to_owned();
        for (j, mut col) in x.axis_iter_mut(Axis(1)).enumerate() {
            let (m, s) = (self.x_means[j], self.x_scales[j]);
            col.mapv_inplace(|v| (v - m) / s);
        }
        x
    }
}

/// Reads a comma-separated file with a header row.
///
/// Every cell must parse as a finite decimal number; quoted fields are
/// rejected. The response column is removed from `X` and the remaining column
/// order is preserved.
pub fn load_csv<T: Scalar>(path: impl AsRef<Path>, response_column: &str) -> Result<Dataset<T>> {
    let file = std::fs::File::open(path)?;
    read_csv(file, response_column)
}

pub fn read_csv<T: Scalar, R: std::io::Read>(reader: R, response_column: &str) -> Result<Dataset<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .delimiter(b',')
        .quoting(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.iter().any(|h| h.contains('"')) {
        return Err(Error::QuotedField { row: 0 });
    }
    let response_idx = header
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| Error::MissingColumn(response_column.to_owned()))?;
    let width = header.len();

    let mut cells: Vec<T> = Vec::new();
    let mut y: Vec<T> = Vec::new();
    let mut rows = 0usize;
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != width {
            return Err(Error::RaggedRow { row, expected: width, found: record.len() });
        }
        for (j, field) in record.iter().enumerate() {
            if field.contains('"') {
                return Err(Error::QuotedField { row });
            }
            let value = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::NonNumeric {
                    row,
                    column: header[j].clone(),
                    value: field.to_owned(),
                })?;
            let value = T::lit(value);
            if j == response_idx {
                y.push(value);
            } else {
                cells.push(value);
            }
        }
        rows += 1;
    }
    if rows < 2 {
        return Err(Error::TooFewRows(rows));
    }
    let p = width - 1;
    let names: Vec<String> = header
        .into_iter()
        .enumerate()
        .filter(|&(j, _)| j != response_idx)
        .map(|(_, h)| h)
        .collect();
    let x = Array2::from_shape_vec((rows, p), cells)
        .map_err(|e| Error::Shape(e.to_string()))?;
    for (j, col) in x.axis_iter(Axis(1)).enumerate() {
        let first = col[0];
        if col.iter().all(|&v| v == first) {
            return Err(Error::ConstantColumn(names[j].clone()));
        }
    }
    Dataset::new(x, Array1::from(y), names)
}

/// Cross products `C = X'X`, `X'y` and `y'y` of a (standardized) dataset.
#[derive(Clone, Debug)]
pub struct GramCache<T> {
    pub c: Array2<T>,
    pub xty: Array1<T>,
    pub yty: T,
    pub n: usize,
}

impl<T: Scalar> GramCache<T> {
    pub fn p(&self) -> usize {
        self.xty.len()
    }

    /// `||y - X beta||^2` evaluated from the cached products.
    pub fn sse(&self, beta: &Array1<T>) -> T {
        let cb = self.c.dot(beta);
        let two = T::lit(2.0);
        (self.yty - two * self.xty.dot(beta) + beta.dot(&cb)).max(T::zero())
    }
}

pub fn gram<T: Scalar>(ds: &Dataset<T>) -> GramCache<T> {
    let p = ds.p();
    let mut c = Array2::<T>::zeros((p, p));
    for i in 0..p {
        let xi = ds.x.column(i);
        for j in i..p {
            c[[i, j]] = xi.dot(&ds.x.column(j));
        }
    }
    symmetrize_from_upper(&mut c);
    GramCache {
        c,
        xty: ds.x.t().dot(&ds.y),
        yty: ds.y.dot(&ds.y),
        n: ds.n(),
    }
}
