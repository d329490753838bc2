use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::seed::SeedPlan;

#[derive(Clone, Debug, PartialEq)]
pub enum Covariance {
    /// `Sigma_ij = rho^|i - j|`.
    Ar1 { rho: f64 },
    /// Group `g` of columns is `Z_g + e`, `Z_g ~ N(0, 1)` shared within the
    /// group and `e ~ N(0, idiosyncratic_var)` per entry; columns after the
    /// last group are independent standard normals.
    GroupedFactors { group_sizes: Vec<usize>, idiosyncratic_var: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimDesign {
    pub name: String,
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    pub beta_true: Array1<f64>,
    pub sigma: f64,
    pub covariance: Covariance,
}

impl SimDesign {
    pub fn p(&self) -> usize {
        self.beta_true.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(Error::parameter("sigma", self.sigma, "(0, inf)"));
        }
        if self.n_train < 2 || self.n_valid < 1 || self.n_test < 1 || self.p() == 0 {
            return Err(Error::Shape(format!("design `{}` has an empty part", self.name)));
        }
        match &self.covariance {
            Covariance::Ar1 { rho } if !(rho.abs() < 1.0) => Err(Error::parameter("rho", *rho, "(-1, 1)")),
            Covariance::GroupedFactors { group_sizes, idiosyncratic_var } => {
                if group_sizes.iter().sum::<usize>() > self.p() {
                    return Err(Error::Shape("factor groups cover more columns than p".into()));
                }
                if !(*idiosyncratic_var >= 0.0) {
                    return Err(Error::parameter("idiosyncratic_var", *idiosyncratic_var, "[0, inf)"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The same design with a different training size.
    pub fn with_n_train(&self, n_train: usize) -> Self {
        SimDesign { n_train, ..self.clone() }
    }
}

fn repeat(v: f64, k: usize) -> impl Iterator<Item = f64> {
    std::iter::repeat_n(v, k)
}

/// Idiosyncratic variance of the grouped-factor example.
pub const GROUPED_IDIOSYNCRATIC_VAR: f64 = 0.01;

/// The five benchmark designs, numbered 1 to 5.
pub fn design_example(k: usize) -> Result<SimDesign> {
    let ar1 = |rho| Covariance::Ar1 { rho };
    let d = match k {
        1 => SimDesign {
            name: "Example 1".into(),
            n_train: 20,
            n_valid: 20,
            n_test: 200,
            beta_true: Array1::from(vec![3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0]),
            sigma: 3.0,
            covariance: ar1(0.5),
        },
        2 => SimDesign {
            name: "Example 2".into(),
            n_train: 100,
            n_valid: 100,
            n_test: 300,
            beta_true: repeat(0.0, 10).chain(repeat(3.0, 10)).chain(repeat(0.0, 10)).chain(repeat(3.0, 10)).collect(),
            sigma: 3.0,
            covariance: ar1(0.5),
        },
        3 => SimDesign {
            name: "Example 3".into(),
            n_train: 50,
            n_valid: 50,
            n_test: 200,
            beta_true: repeat(3.0, 5).chain(repeat(4.0, 5)).chain(repeat(0.0, 20)).collect(),
            sigma: 3.0,
            covariance: Covariance::GroupedFactors {
                group_sizes: vec![5, 5],
                idiosyncratic_var: GROUPED_IDIOSYNCRATIC_VAR,
            },
        },
        4 => SimDesign {
            name: "Example 4".into(),
            n_train: 20,
            n_valid: 20,
            n_test: 200,
            beta_true: Array1::from(vec![3.0, 1.5, 0.0, 0.0, 0.0, 0.0, -1.0, -1.0]),
            sigma: 3.0,
            covariance: ar1(0.5),
        },
        5 => SimDesign {
            name: "Example 5".into(),
            n_train: 50,
            n_valid: 50,
            n_test: 200,
            beta_true: repeat(2.0, 8).chain(repeat(0.0, 22)).collect(),
            sigma: 6.0,
            covariance: ar1(0.9),
        },
        other => return Err(Error::UnknownExample(other)),
    };
    Ok(d)
}

/// One draw of train, validation and test data.
///
/// `train` is standardized, `valid` is standardized with the training
/// statistics, and `test` is kept raw together with its noiseless signal
/// `X beta`.
#[derive(Clone, Debug)]
pub struct SplitData {
    pub train: Dataset<f64>,
    pub valid: Dataset<f64>,
    pub test: Dataset<f64>,
    pub test_signal: Array1<f64>,
    pub x_means_train: Array1<f64>,
    pub y_mean_train: f64,
}

/// `rows x p` covariates from the design's covariance model.
pub fn draw_covariates<R: Rng + ?Sized>(cov: &Covariance, rows: usize, p: usize, rng: &mut R) -> Result<Array2<f64>> {
    match cov {
        Covariance::Ar1 { rho } => {
            let sigma = Array2::from_shape_fn((p, p), |(i, j)| rho.powi((i as i32 - j as i32).abs()));
            let l = Cholesky::factor(sigma.view())?;
            let z = Array2::from_shape_fn((rows, p), |_| rng.sample::<f64, _>(StandardNormal));
            Ok(z.dot(&l.lower().t()))
        }
        Covariance::GroupedFactors { group_sizes, idiosyncratic_var } => {
            let sd = idiosyncratic_var.sqrt();
            let mut x = Array2::zeros((rows, p));
            for i in 0..rows {
                let mut col = 0;
                for &size in group_sizes {
                    let z: f64 = rng.sample(StandardNormal);
                    for _ in 0..size {
                        x[[i, col]] = z + sd * rng.sample::<f64, _>(StandardNormal);
                        col += 1;
                    }
                }
                for c in col..p {
                    x[[i, c]] = rng.sample(StandardNormal);
                }
            }
            Ok(x)
        }
    }
}

/// Draws replication `rep` of `design` from the stream of `plan`.
pub fn generate_rep(design: &SimDesign, plan: &SeedPlan, rep: u64) -> Result<SplitData> {
    design.validate()?;
    let mut rng = plan.rng(rep, &format!("generate-{}", design.name));
    let p = design.p();
    let total = design.n_train + design.n_valid + design.n_test;
    let x = draw_covariates(&design.covariance, total, p, &mut rng)?;
    let signal = x.dot(&design.beta_true);
    let y = &signal + &Array1::from_shape_fn(total, |_| design.sigma * rng.sample::<f64, _>(StandardNormal));

    let (a, b) = (design.n_train, design.n_train + design.n_valid);
    let part = |lo: usize, hi: usize| {
        let idx: Vec<usize> = (lo..hi).collect();
        (x.select(Axis(0), &idx), y.select(Axis(0), &idx))
    };
    let (xt, yt) = part(0, a);
    let (xv, yv) = part(a, b);
    let (xs, ys) = part(b, total);
    let train = Dataset::from_arrays(xt, yt)?.standardize()?;
    let valid = Dataset::from_arrays(xv, yv)?.standardize_with(&train)?;
    let test = Dataset {
        x: xs,
        y: ys,
        column_names: train.column_names.clone(),
        standardized: false,
        x_means: Array1::zeros(p),
        x_scales: Array1::ones(p),
        y_mean: 0.0,
    };
    let test_signal = signal.slice(ndarray::s![b..]).to_owned();
    Ok(SplitData {
        x_means_train: train.x_means.clone(),
        y_mean_train: train.y_mean,
        train,
        valid,
        test,
        test_signal,
    })
}

pub fn generate(design: &SimDesign, seed: u64) -> Result<SplitData> {
    generate_rep(design, &SeedPlan::new(seed), 0)
}
