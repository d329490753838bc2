//! Cyclic coordinate descent for `beta' A beta - 2 b' beta + l1 ||beta||_1`.
//!
//! LASSO, elastic net and the unnormalized penalized losses all reduce to this
//! form once `X'X` and `X'y` are cached, so the solver never touches the design
//! matrix itself.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::linalg::Cholesky;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct CdOptions<T> {
    /// Stop once a full sweep moves no coefficient by more than this.
    pub tol: T,
    pub max_sweeps: usize,
    /// Record the objective after every sweep (index 0 is the start point).
    pub record_trace: bool,
    /// Try the exact support solve after sweeps that keep the sign pattern.
    pub polish: bool,
}

impl<T: Scalar> Default for CdOptions<T> {
    fn default() -> Self {
        CdOptions {
            tol: T::default_tol(),
            max_sweeps: 10_000,
            record_trace: false,
            polish: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CdOutcome<T> {
    pub beta: Array1<T>,
    pub sweeps: usize,
    pub converged: bool,
    pub trace: Vec<T>,
}

#[inline]
pub fn soft_threshold<T: Scalar>(z: T, t: T) -> T {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        T::zero()
    }
}

/// `beta' A beta - 2 b' beta + l1 ||beta||_1`.
pub fn quadratic_l1_objective<T: Scalar>(
    a: ArrayView2<T>,
    b: ArrayView1<T>,
    l1: T,
    beta: ArrayView1<T>,
) -> T {
    let ab = a.dot(&beta);
    beta.dot(&ab) - T::lit(2.0) * b.dot(&beta) + l1 * beta.iter().map(|v| v.abs()).sum::<T>()
}

/// Minimizes the quadratic-plus-l1 objective; `a` must be symmetric PSD.
///
/// Coordinates with `A_jj == 0` are pinned at zero. Whenever a sweep leaves
/// the sign pattern unchanged, the stationarity equations restricted to the
/// support are solved directly; the solution is accepted if it keeps those
/// signs and satisfies the optimality conditions off the support.
pub fn quadratic_l1<T: Scalar>(
    a: ArrayView2<T>,
    b: ArrayView1<T>,
    l1: T,
    start: Option<ArrayView1<T>>,
    opts: &CdOptions<T>,
) -> CdOutcome<T> {
    let p = b.len();
    let half_l1 = l1 / T::lit(2.0);
    let mut beta = match start {
        Some(s) => s.to_owned(),
        None => Array1::zeros(p),
    };
    // grad = A beta, kept in sync with every coordinate move
    let mut grad = a.dot(&beta);
    let mut trace = Vec::new();
    if opts.record_trace {
        trace.push(quadratic_l1_objective(a, b, l1, beta.view()));
    }

    let mut sweeps = 0;
    let mut converged = false;
    let mut signs = sign_pattern(&beta);
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut max_change = T::zero();
        for j in 0..p {
            let ajj = a[[j, j]];
            let old = beta[j];
            let new = if ajj > T::zero() {
                let r = b[j] - grad[j] + ajj * old;
                soft_threshold(r, half_l1) / ajj
            } else {
                T::zero()
            };
            let delta = new - old;
            if delta != T::zero() {
                beta[j] = new;
                grad.scaled_add(delta, &a.column(j));
                max_change = max_change.max(delta.abs());
            }
        }
        if opts.record_trace {
            trace.push(quadratic_l1_objective(a, b, l1, beta.view()));
        }
        if max_change < opts.tol {
            converged = true;
            break;
        }
        let now = sign_pattern(&beta);
        if opts.polish && now == signs {
            if let Some(exact) = solve_on_support(a, b, half_l1, &now) {
                beta = exact;
                if opts.record_trace {
                    trace.push(quadratic_l1_objective(a, b, l1, beta.view()));
                }
                converged = true;
                break;
            }
        }
        signs = now;
    }
    CdOutcome {
        beta,
        sweeps,
        converged,
        trace,
    }
}

fn sign_pattern<T: Scalar>(beta: &Array1<T>) -> Vec<i8> {
    beta.iter()
        .map(|&v| if v > T::zero() { 1 } else if v < T::zero() { -1 } else { 0 })
        .collect()
}

/// Solves `A_SS beta_S = b_S - half_l1 s_S` on the support `S` of `signs` and
/// returns the full vector if it is a minimizer with that sign pattern.
fn solve_on_support<T: Scalar>(a: ArrayView2<T>, b: ArrayView1<T>, half_l1: T, signs: &[i8]) -> Option<Array1<T>> {
    let support: Vec<usize> = (0..signs.len()).filter(|&j| signs[j] != 0).collect();
    let m = support.len();
    let mut beta = Array1::zeros(signs.len());
    if m > 0 {
        let sub = Array2::from_shape_fn((m, m), |(i, k)| a[[support[i], support[k]]]);
        let rhs = Array1::from_shape_fn(m, |i| {
            let j = support[i];
            b[j] - half_l1 * T::lit(signs[j] as f64)
        });
        let sol = Cholesky::factor(sub.view()).ok()?.solve(rhs.view());
        for (i, &j) in support.iter().enumerate() {
            if sol[i] * T::lit(signs[j] as f64) <= T::zero() {
                return None;
            }
            beta[j] = sol[i];
        }
    }
    let grad = a.dot(&beta);
    let slack = T::lit(1e-10);
    for j in 0..signs.len() {
        if signs[j] == 0 && (b[j] - grad[j]).abs() > half_l1 + slack * (T::one() + b[j].abs()) {
            return None;
        }
    }
    Some(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-1.0, 1.0), 0.0);
    }

    #[test]
    fn diagonal_problem_is_one_sweep_closed_form() {
        let a = array![[2.0, 0.0], [0.0, 1.0]];
        let b = array![3.0, -0.2];
        let out = quadratic_l1(a.view(), b.view(), 1.0, None, &CdOptions::default());
        assert!(out.converged);
        assert_eq!(out.beta, array![(3.0 - 0.5) / 2.0, 0.0]);
    }

    #[test]
    fn objective_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = Array2::from_shape_fn((12, 6), |_| rng.random_range(-1.0f64..1.0));
            let a = m.t().dot(&m);
            let b = Array1::from_shape_fn(6, |_| rng.random_range(-2.0..2.0));
            let opts = CdOptions { record_trace: true, ..CdOptions::default() };
            let out = quadratic_l1(a.view(), b.view(), rng.random_range(0.0..2.0), None, &opts);
            assert!(out.converged);
            for w in out.trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), "{} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn polish_agrees_with_plain_sweeps() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let m = Array2::from_shape_fn((15, 6), |_| rng.random_range(-1.0..1.0));
            let a = m.t().dot(&m);
            let b = Array1::from_shape_fn(6, |_| rng.random_range(-2.0..2.0));
            let l1 = rng.random_range(0.0..3.0);
            let plain = CdOptions { polish: false, tol: 1e-13, ..CdOptions::default() };
            let x = quadratic_l1(a.view(), b.view(), l1, None, &plain);
            let y = quadratic_l1(a.view(), b.view(), l1, None, &CdOptions::default());
            assert!(x.converged && y.converged);
            let gap = (&x.beta - &y.beta).mapv(f64::abs).fold(0.0f64, |p, &q| p.max(q));
            assert!(gap < 1e-9, "{gap}");
        }
    }

    #[test]
    fn max_sweeps_reports_nonconvergence() {
        let a = array![[1.0, 0.99], [0.99, 1.0]];
        let b = array![1.0, -1.0];
        let opts = CdOptions { max_sweeps: 2, polish: false, ..CdOptions::default() };
        let out = quadratic_l1(a.view(), b.view(), 0.0, None, &opts);
        assert!(!out.converged);
        assert_eq!(out.sweeps, 2);
    }
}
