//! Small dense linear algebra: Cholesky solves and spectral-norm estimation.
//!
//! Every matrix in this crate is `p x p` with `p` in the tens, so the routines
//! here are plain loops over `ndarray` storage.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lower-triangular Cholesky factor `L` with `A = L L'`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    lower: Array2<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Factors a symmetric positive-definite matrix. Only the lower triangle of
    /// `a` is read.
    pub fn factor(a: ArrayView2<T>) -> Result<Self> {
        Self::factor_with_floor(a, T::zero())
            .map_err(|e| match e {
                Error::Singular { pivot } => Error::NotPositiveDefinite { pivot },
                other => other,
            })
    }

    /// Factors `a`, rejecting any pivot (diagonal entry before the square root)
    /// that is `<= floor`. Returns [`Error::Singular`] naming the pivot index.
    pub fn factor_with_floor(a: ArrayView2<T>, floor: T) -> Result<Self> {
        let p = a.nrows();
        if a.ncols() != p {
            return Err(Error::Shape(format!("expected square matrix, got {}x{}", p, a.ncols())));
        }
        let mut l = Array2::<T>::zeros((p, p));
        for j in 0..p {
            let mut diag = a[[j, j]];
            for k in 0..j {
                diag = diag - l[[j, k]] * l[[j, k]];
            }
            if !(diag > floor) || !diag.is_finite() {
                return Err(Error::Singular { pivot: j });
            }
            let ljj = diag.sqrt();
            l[[j, j]] = ljj;
            for i in (j + 1)..p {
                let mut s = a[[i, j]];
                for k in 0..j {
                    s = s - l[[i, k]] * l[[j, k]];
                }
                l[[i, j]] = s / ljj;
            }
        }
        Ok(Cholesky { lower: l })
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    pub fn lower(&self) -> &Array2<T> {
        &self.lower
    }

    pub fn solve(&self, b: ArrayView1<T>) -> Array1<T> {
        let p = self.dim();
        assert_eq!(b.len(), p, "rhs length must match factor dimension");
        let l = &self.lower;
        let mut z = b.to_owned();
        for i in 0..p {
            let mut s = z[i];
            for k in 0..i {
                s = s - l[[i, k]] * z[k];
            }
            z[i] = s / l[[i, i]];
        }
        for i in (0..p).rev() {
            let mut s = z[i];
            for k in (i + 1)..p {
                s = s - l[[k, i]] * z[k];
            }
            z[i] = s / l[[i, i]];
        }
        z
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: ArrayView2<T>) -> Array2<T> {
        let mut out = Array2::<T>::zeros(b.raw_dim());
        for (j, col) in b.axis_iter(Axis(1)).enumerate() {
            out.column_mut(j).assign(&self.solve(col));
        }
        out
    }
}

/// Solves `A x = b` for symmetric positive-definite `A` via Cholesky.
pub fn solve_spd<T: Scalar>(a: ArrayView2<T>, b: ArrayView1<T>) -> Result<Array1<T>> {
    if b.len() != a.nrows() {
        return Err(Error::Shape(format!(
            "rhs length {} does not match matrix order {}",
            b.len(),
            a.nrows()
        )));
    }
    Ok(Cholesky::factor(a)?.solve(b))
}

/// `A + s I` for square `A`.
pub fn add_diagonal<T: Scalar>(a: ArrayView2<T>, s: T) -> Array2<T> {
    let mut out = a.to_owned();
    for i in 0..out.nrows() {
        out[[i, i]] = out[[i, i]] + s;
    }
    out
}

pub fn trace<T: Scalar>(a: ArrayView2<T>) -> T {
    a.diag().iter().copied().sum()
}

pub fn norm_inf<T: Scalar>(v: ArrayView1<T>) -> T {
    v.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

pub fn norm_l1<T: Scalar>(v: ArrayView1<T>) -> T {
    v.iter().map(|x| x.abs()).sum()
}

/// Maximum absolute row sum.
pub fn matrix_norm_inf<T: Scalar>(a: ArrayView2<T>) -> T {
    a.rows()
        .into_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<T>())
        .fold(T::zero(), T::max)
}

/// Largest singular value of `a`, by power iteration on `a' a`.
///
/// Starts from the all-ones vector and stops once successive estimates agree
/// to `1e-13` relative or after `max_iter` steps.
pub fn spectral_norm<T: Scalar>(a: ArrayView2<T>, max_iter: usize) -> T {
    let p = a.ncols();
    if p == 0 || a.nrows() == 0 {
        return T::zero();
    }
    let mut v = Array1::<T>::from_elem(p, T::one() / T::from_usize_lossy(p).sqrt());
    let mut estimate = T::zero();
    for _ in 0..max_iter {
        let av = a.dot(&v);
        let w = a.t().dot(&av);
        let norm = w.dot(&w).sqrt();
        if norm == T::zero() {
            return T::zero();
        }
        let next = av.dot(&av).sqrt();
        v = w / norm;
        if (next - estimate).abs() <= T::lit(1e-13) * next {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Copies the upper triangle onto the lower so the result is exactly symmetric.
pub fn symmetrize_from_upper<T: Scalar>(a: &mut Array2<T>) {
    let p = a.nrows();
    for i in 0..p {
        for j in (i + 1)..p {
            a[[j, i]] = a[[i, j]];
        }
    }
}
