use std::fmt::Write as _;
use std::io::Write;

use ndarray::Array1;
use rayon::prelude::*;

use super::design::{generate_rep, SimDesign};
use super::metrics::{mse_beta, mse_y};
use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, PenaltySpec, Problem};
use crate::seed::SeedPlan;
use crate::stats::{bootstrap_median_se, median, BOOTSTRAP_RESAMPLES};
use crate::tuning::{select_on_problem, TuningGrids};

/// Test and coefficient error of one estimator in one replication, with the
/// tuning point chosen on the validation set.
#[derive(Clone, Debug)]
pub struct RepOutcome {
    pub mse_y: f64,
    pub mse_beta: f64,
    pub chosen: PenaltySpec<f64>,
}

/// Per-replication results of one estimator on one design.
#[derive(Clone, Debug)]
pub struct EstimatorSummary {
    pub kind: EstimatorKind,
    /// Empty when the estimator cannot be fitted on this design.
    pub mse_y: Vec<f64>,
    pub mse_beta: Vec<f64>,
    pub chosen: Vec<PenaltySpec<f64>>,
    pub median_mse_y: f64,
    pub se_mse_y: f64,
    pub median_mse_beta: f64,
    pub se_mse_beta: f64,
}

impl EstimatorSummary {
    pub fn available(&self) -> bool {
        !self.mse_y.is_empty()
    }

    pub fn reps(&self) -> usize {
        self.mse_y.len()
    }
}

#[derive(Clone, Debug)]
pub struct DesignReport {
    pub design: String,
    pub rows: Vec<EstimatorSummary>,
}

impl DesignReport {
    pub fn row(&self, kind: EstimatorKind) -> Option<&EstimatorSummary> {
        self.rows.iter().find(|r| r.kind == kind)
    }
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub designs: Vec<DesignReport>,
    pub reps: usize,
    pub seed: u64,
    pub grids: TuningGrids<f64>,
}

fn run_rep(
    design: &SimDesign,
    kinds: &[EstimatorKind],
    grids: &TuningGrids<f64>,
    plan: &SeedPlan,
    rep: u64,
) -> Result<Vec<Option<RepOutcome>>> {
    let split = generate_rep(design, plan, rep)?;
    let problem = Problem::new(&split.train);
    kinds
        .iter()
        .map(|&kind| {
            let sel = match select_on_problem(&problem, split.valid.x.view(), split.valid.y.view(), kind, grids) {
                Ok(s) => s,
                Err(Error::Singular { .. } | Error::NotPositiveDefinite { .. } | Error::Inapplicable(_)) => {
                    return Ok(None)
                }
                Err(e) => return Err(e),
            };
            let fit = problem.fit(&sel.chosen)?;
            let coef = fit.coef_original();
            Ok(Some(RepOutcome {
                mse_y: mse_y(
                    split.test.x.view(),
                    coef.view(),
                    split.x_means_train.view(),
                    split.y_mean_train,
                    design.beta_true.view(),
                )?,
                mse_beta: mse_beta(coef.view(), design.beta_true.view())?,
                chosen: sel.chosen,
            }))
        })
        .collect()
}

/// Runs `reps` replications of every design. Replication `r` draws all of its
/// data from `SeedPlan::new(seed).stream(r, ..)`, so the report does not
/// depend on how rayon schedules the work.
///
/// An estimator that cannot be fitted on a design (for example OLS with
/// `p >= n_train`) gets an empty row instead of failing the run.
pub fn run_benchmark(
    designs: &[SimDesign],
    estimators: &[EstimatorKind],
    reps: usize,
    seed: u64,
    grids: &TuningGrids<f64>,
) -> Result<BenchReport> {
    if reps == 0 {
        return Err(Error::parameter("reps", 0.0, "[1, inf)"));
    }
    let plan = SeedPlan::new(seed);
    let mut out = Vec::with_capacity(designs.len());
    for design in designs {
        let per_rep: Vec<Vec<Option<RepOutcome>>> = (0..reps as u64)
            .into_par_iter()
            .map(|r| run_rep(design, estimators, grids, &plan, r))
            .collect::<Result<_>>()?;
        let rows = estimators
            .iter()
            .enumerate()
            .map(|(e, &kind)| summarize(design, kind, per_rep.iter().map(|rep| rep[e].as_ref()), &plan))
            .collect();
        out.push(DesignReport { design: design.name.clone(), rows });
    }
    Ok(BenchReport { designs: out, reps, seed, grids: grids.clone() })
}

fn summarize<'a>(
    design: &SimDesign,
    kind: EstimatorKind,
    reps: impl Iterator<Item = Option<&'a RepOutcome>>,
    plan: &SeedPlan,
) -> EstimatorSummary {
    let (mut ys, mut bs, mut chosen) = (Vec::new(), Vec::new(), Vec::new());
    let mut complete = true;
    for r in reps {
        match r {
            Some(o) => {
                ys.push(o.mse_y);
                bs.push(o.mse_beta);
                chosen.push(o.chosen.clone());
            }
            None => complete = false,
        }
    }
    if !complete {
        ys.clear();
        bs.clear();
        chosen.clear();
    }
    let tag = format!("bootstrap-{}-{}", design.name, kind.label());
    let se_y = bootstrap_median_se(&ys, BOOTSTRAP_RESAMPLES, &mut plan.rng(0, &format!("{tag}-y")));
    let se_b = bootstrap_median_se(&bs, BOOTSTRAP_RESAMPLES, &mut plan.rng(0, &format!("{tag}-beta")));
    EstimatorSummary {
        kind,
        median_mse_y: median(&ys),
        se_mse_y: se_y,
        median_mse_beta: median(&bs),
        se_mse_beta: se_b,
        mse_y: ys,
        mse_beta: bs,
        chosen,
    }
}

pub const CSV_HEADER: &str = "design,estimator,median_mse_y,se_mse_y,median_mse_beta,se_mse_beta,reps,seed";

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        "NA".into()
    }
}

impl BenchReport {
    pub fn design(&self, name: &str) -> Option<&DesignReport> {
        self.designs.iter().find(|d| d.design == name)
    }

    /// One row per design and estimator; unavailable estimators print `NA`
    /// and `reps = 0`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{CSV_HEADER}").unwrap();
        for d in &self.designs {
            for r in &d.rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    d.design,
                    r.kind.label(),
                    num(r.median_mse_y),
                    num(r.se_mse_y),
                    num(r.median_mse_beta),
                    num(r.se_mse_beta),
                    r.reps(),
                    self.seed
                )
                .unwrap();
            }
        }
        s
    }

    /// Every replication's errors: `design,estimator,rep,mse_y,mse_beta`.
    pub fn raw_csv(&self) -> String {
        let mut s = String::from("design,estimator,rep,mse_y,mse_beta\n");
        for d in &self.designs {
            for r in &d.rows {
                for (i, (y, b)) in r.mse_y.iter().zip(&r.mse_beta).enumerate() {
                    writeln!(s, "{},{},{},{},{}", d.design, r.kind.label(), i, num(*y), num(*b)).unwrap();
                }
            }
        }
        s
    }

    /// Aligned text table, medians with bootstrap standard errors in brackets.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        for d in &self.designs {
            writeln!(s, "{} ({} replications, seed {})", d.design, self.reps, self.seed).unwrap();
            writeln!(s, "  {:<10} {:>22} {:>22}", "estimator", "median MSE_y (se)", "median MSE_beta (se)").unwrap();
            for r in &d.rows {
                if r.available() {
                    let y = format!("{:.3} ({:.3})", r.median_mse_y, r.se_mse_y);
                    let b = format!("{:.3} ({:.3})", r.median_mse_beta, r.se_mse_beta);
                    writeln!(s, "  {:<10} {:>22} {:>22}", r.kind.label(), y, b).unwrap();
                } else {
                    writeln!(s, "  {:<10} {:>22} {:>22}", r.kind.label(), "n/a", "n/a").unwrap();
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyRow {
    pub n: usize,
    pub lambda: f64,
    /// Median over replications of `sqrt(n) ||beta_hat - beta||_2`.
    pub median_stat: f64,
    pub se: f64,
}

/// LLASSO at `lambda = c / n` and fixed `d` on training sets of each size in
/// `n_list`, reporting the median of `sqrt(n) ||beta_hat - beta||_2`. A
/// bounded statistic across `n` is the empirical signature of a `sqrt(n)` rate.
pub fn consistency_harness(
    template: &SimDesign,
    n_list: &[usize],
    reps: usize,
    seed: u64,
    c: f64,
    d: f64,
) -> Result<Vec<ConsistencyRow>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Shape("n_list must be strictly increasing".into()));
    }
    if reps == 0 {
        return Err(Error::parameter("reps", 0.0, "[1, inf)"));
    }
    let plan = SeedPlan::new(seed);
    n_list
        .iter()
        .map(|&n| {
            let design = template.with_n_train(n);
            let lambda = c / n as f64;
            let stats: Vec<f64> = (0..reps as u64)
                .into_par_iter()
                .map(|r| {
                    let split = generate_rep(&design, &plan, r)?;
                    let fit = Problem::new(&split.train).llasso(lambda, d)?;
                    let err: Array1<f64> = fit.coef_original() - &design.beta_true;
                    Ok((n as f64).sqrt() * err.dot(&err).sqrt())
                })
                .collect::<Result<_>>()?;
            let mut rng = plan.rng(n as u64, "consistency-bootstrap");
            Ok(ConsistencyRow {
                n,
                lambda,
                median_stat: median(&stats),
                se: bootstrap_median_se(&stats, BOOTSTRAP_RESAMPLES, &mut rng),
            })
        })
        .collect()
}
