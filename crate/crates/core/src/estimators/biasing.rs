use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{add_diagonal, spectral_norm, Cholesky};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum BiasingParam<T> {
    Scalar(T),
    Diagonal(Array1<T>),
}

/// The matrix `(C + I)^{-1}(C + D)` with `D = d I` or `D = diag(d)`.
///
/// With `D = d I` its eigenvalues are `(mu + d) / (mu + 1)` for the eigenvalues
/// `mu` of `C`, so they lie in `[d, 1]`.
#[derive(Clone, Debug)]
pub struct BiasingFactor<T> {
    pub matrix: Array2<T>,
    pub d: BiasingParam<T>,
}

impl<T: Scalar> BiasingFactor<T> {
    pub fn scalar(c: &Array2<T>, d: T) -> Result<Self> {
        if !(d >= T::zero() && d <= T::one()) {
            return Err(Error::parameter("d", d.as_f64(), "[0, 1]"));
        }
        let p = c.nrows();
        Self::build(c, &Array1::from_elem(p, d), BiasingParam::Scalar(d))
    }

    pub fn diagonal(c: &Array2<T>, d: Array1<T>) -> Result<Self> {
        if d.len() != c.nrows() {
            return Err(Error::Shape(format!("D has {} entries, expected {}", d.len(), c.nrows())));
        }
        if let Some(&bad) = d.iter().find(|&&v| !(v >= T::zero() && v <= T::one())) {
            return Err(Error::parameter("D_j", bad.as_f64(), "[0, 1]"));
        }
        Self::build(c, &d, BiasingParam::Diagonal(d.clone()))
    }

    fn build(c: &Array2<T>, diag: &Array1<T>, d: BiasingParam<T>) -> Result<Self> {
        let chol = Cholesky::factor(add_diagonal(c.view(), T::one()).view())?;
        let mut rhs = c.clone();
        for (j, &dj) in diag.iter().enumerate() {
            rhs[[j, j]] = rhs[[j, j]] + dj;
        }
        Ok(BiasingFactor {
            matrix: chol.solve_matrix(rhs.view()),
            d,
        })
    }

    pub fn apply(&self, beta: &Array1<T>) -> Array1<T> {
        self.matrix.dot(beta)
    }

    /// `||F||_2` by power iteration.
    pub fn spectral_norm(&self) -> T {
        spectral_norm(self.matrix.view(), 10_000)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_d_is_identity() {
        let c = array![[4.0, 1.0], [1.0, 3.0]];
        let f = BiasingFactor::scalar(&c, 1.0).unwrap();
        assert_abs_diff_eq!(f.matrix, Array2::eye(2), epsilon = 1e-14);
    }

    #[test]
    fn diagonal_c_has_explicit_eigenvalues() {
        let c = array![[9.0, 0.0], [0.0, 0.5]];
        let d = 0.2;
        let f = BiasingFactor::scalar(&c, d).unwrap();
        assert_abs_diff_eq!(f.matrix[[0, 0]], (9.0 + d) / 10.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.matrix[[1, 1]], (0.5 + d) / 1.5, epsilon = 1e-14);
    }

    #[test]
    fn spectral_norm_at_most_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let p = rng.random_range(2..8);
            let m = Array2::from_shape_fn((p + 2, p), |_| rng.random_range(-2.0..2.0));
            let c = m.t().dot(&m);
            let d = rng.random_range(0.0..=1.0);
            let f = BiasingFactor::scalar(&c, d).unwrap();
            assert!(f.spectral_norm() <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        let c = Array2::<f64>::eye(2);
        assert!(BiasingFactor::scalar(&c, 1.2).is_err());
        assert!(BiasingFactor::diagonal(&c, array![0.5, -0.1]).is_err());
        assert!(BiasingFactor::diagonal(&c, array![0.5]).is_err());
    }
}
