//! End-to-end acceptance checks. Prints one PASS/FAIL/SKIP line per criterion
//! and exits non-zero if any criterion fails.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{lasso_by_enumeration, lasso_objective, max_abs_diff, rng, std_dataset};
use llasso::estimators::equivalence::{naive_loss, prop1_augment, prop2_objective};
use llasso::estimators::{fit_enet, fit_gen_llasso, fit_lasso, fit_liu, fit_llasso, fit_ols, fit_ridge};
use llasso::orthonormal::{mc_risk, prop4_bound, prop4_mc, risk_closed_form, universal_lambda, OrthoConfig};
use llasso::simbench::{consistency_harness, design_example, run_benchmark};
use llasso::tuning::{choose_d_l1, kfold_cv, TuningGrids};
use llasso::{load_csv, EstimatorKind, Problem};
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

enum Verdict {
    Pass,
    Fail,
    Skip,
}

struct Outcome {
    verdict: Verdict,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: String) -> Self {
        Outcome { verdict: if ok { Verdict::Pass } else { Verdict::Fail }, detail }
    }
}

fn timed(limit: Duration, ok: bool, detail: String, started: Instant) -> Outcome {
    let took = started.elapsed();
    Outcome::check(ok && took < limit, format!("{detail}; {:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs()))
}

fn normal(r: &mut impl Rng) -> f64 {
    Distribution::<f64>::sample(&StandardNormal, r)
}

fn reductions() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = r.random_range(1..=8);
        let n = r.random_range(p + 2..=60);
        let ds = std_dataset(&mut r, n, p);
        let lambda = r.random_range(0.0..1.0) * Problem::new(&ds).lambda_max();
        let d = r.random_range(0.0..1.0);
        let lasso = fit_lasso(&ds, lambda).unwrap().beta;
        let ols = fit_ols(&ds).unwrap().beta;
        let gaps = [
            max_abs_diff(&fit_llasso(&ds, lambda, 1.0).unwrap().beta, &lasso),
            max_abs_diff(&fit_liu(&ds, 1.0).unwrap().beta, &ols),
            max_abs_diff(&fit_ridge(&ds, 0.0).unwrap().beta, &ols),
            max_abs_diff(&fit_enet(&ds, lambda, 0.0).unwrap().beta, &lasso),
            max_abs_diff(
                &fit_gen_llasso(&ds, lambda, Array1::from_elem(p, d)).unwrap().beta,
                &fit_llasso(&ds, lambda, d).unwrap().beta,
            ),
        ];
        worst = gaps.iter().fold(worst, |m, &g| m.max(g));
    }
    timed(Duration::from_secs(1), worst < 1e-8, format!("max gap {worst:.2e} (tol 1e-8)"), t0)
}

fn lasso_oracle() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = r.random_range(1..=5);
        let n = r.random_range(p + 2..=30);
        let ds = std_dataset(&mut r, n, p);
        let pr = Problem::new(&ds);
        let lambda = r.random_range(0.0..1.1) * pr.lambda_max();
        let fit = pr.lasso(lambda).unwrap();
        let (_, best) = lasso_by_enumeration(&ds, lambda);
        worst = worst.max((lasso_objective(&ds, &fit.beta, lambda) - best).abs());
    }
    timed(Duration::from_secs(10), worst < 1e-6, format!("max objective gap {worst:.2e} (tol 1e-6)"), t0)
}

fn gram_identity() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = r.random_range(1..=6);
        let n = r.random_range(p + 2..=30);
        let ds = std_dataset(&mut r, n, p);
        let l2 = r.random_range(0.0..10.0);
        let (_, xs) = prop1_augment(&ds, l2).unwrap();
        let lhs = xs.t().dot(&xs);
        let rhs = (ds.x.t().dot(&ds.x) + Array2::<f64>::eye(p) * l2) / (1.0 + l2);
        let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        worst = worst.max((&lhs - &rhs).iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale);
    }
    timed(Duration::from_secs(60), worst < 1e-12, format!("max relative gap {worst:.2e} (tol 1e-12)"), t0)
}

fn loss_differences() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = r.random_range(1..=6);
        let n = r.random_range(p + 2..=30);
        let ds = std_dataset(&mut r, n, p);
        let ols = fit_ols(&ds).unwrap().beta;
        let (l1, l2, d) = (r.random_range(0.0..3.0), r.random_range(0.01..5.0), r.random_range(0.01..0.99));
        let a = Array1::from_shape_fn(p, |_| normal(&mut r));
        let b = Array1::from_shape_fn(p, |_| normal(&mut r));
        let dn = naive_loss(&ds, &a, l1, l2, d, &ols) - naive_loss(&ds, &b, l1, l2, d, &ols);
        let dp = prop2_objective(&ds, &a, l1, l2, d, &ols) - prop2_objective(&ds, &b, l1, l2, d, &ols);
        worst = worst.max((dn - dp).abs() / dn.abs().max(1.0));
    }
    timed(Duration::from_secs(60), worst < 1e-8, format!("max relative gap {worst:.2e} (tol 1e-8)"), t0)
}

fn orthonormal_risk() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(5);
    let (mut within, mut factor_gap) = (0, 0.0f64);
    let mut worst_z = 0.0f64;
    for i in 0..200u64 {
        let p = r.random_range(1..=3);
        let delta: Vec<f64> = (0..p).map(|_| r.random_range(-3.0..3.0)).collect();
        let lam = r.random_range(0.0..3.0);
        let d = r.random_range(0.0..=1.0);
        let cfg = OrthoConfig::new(delta.clone(), lam, d, 1.0, 0.1).unwrap();
        let closed = risk_closed_form(&cfg);
        let mc = mc_risk(&cfg, 1_000_000, 1000 + i).unwrap();
        let z = (closed - mc.estimate).abs() / mc.mc_se.max(1e-300);
        worst_z = worst_z.max(z);
        if z <= 3.0 {
            within += 1;
        }
        let at_one = risk_closed_form(&OrthoConfig::new(delta, lam, 1.0, 1.0, 0.1).unwrap());
        factor_gap = factor_gap.max((closed - (1.0 + d).powi(2) / 4.0 * at_one).abs());
    }
    timed(
        Duration::from_secs(120),
        within == 200 && factor_gap < 1e-12,
        format!("{within}/200 configs within 3 MC s.e. (worst {worst_z:.1}); factorization gap {factor_gap:.2e}"),
        t0,
    )
}

fn universal_bound() -> Outcome {
    let t0 = Instant::now();
    let mut violations = Vec::new();
    let mut cells = 0;
    for (i, &delta) in [0.0, 0.5, 1.0, 2.0, 4.0].iter().enumerate() {
        for (j, &level) in [0.5, 0.1, 0.01].iter().enumerate() {
            for (k, &d) in [0.2, 0.5, 0.8].iter().enumerate() {
                cells += 1;
                let cfg = OrthoConfig::new(vec![delta], universal_lambda(1.0, level) / 2.0, d, 1.0, level).unwrap();
                let bound = prop4_bound(&cfg)[0];
                let mc = prop4_mc(&cfg, 100_000, (100 * i + 10 * j + k) as u64).unwrap()[0];
                if mc.estimate > bound + 3.0 * mc.mc_se {
                    violations.push(format!("(Delta={delta}, delta={level}, d={d}: mse {:.3} > bound {:.3})", mc.estimate, bound));
                }
            }
        }
    }
    let shown: Vec<&str> = violations.iter().take(3).map(String::as_str).collect();
    timed(
        Duration::from_secs(120),
        violations.is_empty(),
        format!("{} of {cells} cells violate the bound {}", violations.len(), shown.join(" ")),
        t0,
    )
}

fn choose_d_grid() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(6);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let m = r.random_range(1..=10);
        let a = Array1::from_shape_fn(m, |_| normal(&mut r));
        let t = Array1::from_shape_fn(m, |_| normal(&mut r));
        let obj = |d: f64| a.iter().zip(&t).map(|(a, t)| (d * a - t).abs()).sum::<f64>();
        let d = choose_d_l1(&a, &t).unwrap();
        let grid_best = (0..=10_000).map(|i| obj(i as f64 * 1e-4)).fold(f64::INFINITY, f64::min);
        worst = worst.max(obj(d) - grid_best);
    }
    timed(Duration::from_secs(5), worst <= 1e-12, format!("max excess over grid optimum {worst:.2e}"), t0)
}

const REFERENCE_MSE_Y: [(EstimatorKind, [f64; 5]); 3] = [
    (EstimatorKind::Ols, [5.723, 6.980, 69.039, 5.625, 49.400]),
    (EstimatorKind::Ridge, [3.494, 5.702, 49.000, 3.457, 7.799]),
    (EstimatorKind::Lasso, [3.225, 4.668, 46.347, 3.187, 8.083]),
];

fn simulation_study() -> Outcome {
    let t0 = Instant::now();
    let designs: Vec<_> = (1..=5).map(|k| design_example(k).unwrap()).collect();
    let report = run_benchmark(&designs, &EstimatorKind::BENCHMARK, 250, 12345, &TuningGrids::default()).unwrap();
    let mut failures = Vec::new();
    for (e, dr) in report.designs.iter().enumerate() {
        let med = |k: EstimatorKind| dr.row(k).filter(|s| s.available()).map(|s| s.median_mse_y);
        let ll = med(EstimatorKind::LLasso).unwrap_or(f64::NAN);
        for other in [EstimatorKind::Ols, EstimatorKind::Liu] {
            if !med(other).is_some_and(|v| ll < v) {
                failures.push(format!("Ex{}: LLASSO {ll:.3} not below {}", e + 1, other.label()));
            }
        }
        if e != 1 {
            for k in EstimatorKind::BENCHMARK.iter().filter(|&&k| k != EstimatorKind::LLasso) {
                if let Some(v) = med(*k) {
                    if v <= ll {
                        failures.push(format!("Ex{}: {} {v:.3} <= LLASSO {ll:.3}", e + 1, k.label()));
                    }
                }
            }
        }
        for (k, reference) in REFERENCE_MSE_Y.iter() {
            let v = med(*k).unwrap_or(f64::NAN);
            let rel = v / reference[e] - 1.0;
            if !(rel.abs() <= 0.25) {
                failures.push(format!("Ex{}: {} {v:.3} vs {:.3} ({:+.0}%)", e + 1, k.label(), reference[e], rel * 100.0));
            }
        }
    }
    let ex5 = &report.designs[4];
    let beta = |k| ex5.row(k).map(|s| s.median_mse_beta).unwrap_or(f64::NAN);
    if !(beta(EstimatorKind::Ridge) < beta(EstimatorKind::Lasso)) {
        failures.push(format!(
            "Ex5: Ridge MSE_beta {:.3} not below LASSO {:.3}",
            beta(EstimatorKind::Ridge),
            beta(EstimatorKind::Lasso)
        ));
    }
    let detail = if failures.is_empty() { "all orderings and bands hold".to_owned() } else { failures.join("; ") };
    timed(Duration::from_secs(900), failures.is_empty(), detail, t0)
}

fn data_dir() -> PathBuf {
    std::env::var_os("LLASSO_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data"))
}

fn real_data_cv() -> Outcome {
    let dir = data_dir();
    let sets = [("state.csv", "Life.Exp"), ("prostate.csv", "lpsa")];
    if sets.iter().any(|(f, _)| !dir.join(f).is_file()) {
        return Outcome {
            verdict: Verdict::Skip,
            detail: format!("state.csv / prostate.csv not found in {}", dir.display()),
        };
    }
    let t0 = Instant::now();
    let reference: [[f64; 4]; 2] = [[0.94867, 0.94083, 0.94349, 0.93647], [0.63301, 0.61922, 0.63196, 0.62816]];
    let kinds = [EstimatorKind::Ols, EstimatorKind::Ridge, EstimatorKind::Lasso, EstimatorKind::LLasso];
    let mut failures = Vec::new();
    for (s, (file, response)) in sets.iter().enumerate() {
        let ds = match load_csv::<f64>(dir.join(file), response) {
            Ok(ds) => ds,
            Err(e) => return Outcome::check(false, format!("{file}: {e}")),
        };
        let med: Vec<f64> = kinds
            .iter()
            .map(|&k| kfold_cv(&ds, k, &TuningGrids::default(), 10, 250, 12345).map(|r| r.median_mse).unwrap_or(f64::NAN))
            .collect();
        if !(med[3] < med[2]) {
            failures.push(format!("{file}: LLASSO {:.5} not below LASSO {:.5}", med[3], med[2]));
        }
        if s == 1 && !(med[1] < med[0]) {
            failures.push(format!("{file}: Ridge {:.5} not below OLS {:.5}", med[1], med[0]));
        }
        for (i, k) in kinds.iter().enumerate() {
            if !((med[i] / reference[s][i] - 1.0).abs() <= 0.10) {
                failures.push(format!("{file}: {} {:.5} vs {:.5}", k.label(), med[i], reference[s][i]));
            }
        }
    }
    let detail = if failures.is_empty() { "orderings and bands hold".to_owned() } else { failures.join("; ") };
    timed(Duration::from_secs(300), failures.is_empty(), detail, t0)
}

fn simulate_csv(threads: Option<&str>) -> Vec<u8> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_llasso"));
    if let Some(t) = threads {
        cmd.args(["--threads", t]);
    }
    let out = cmd
        .args(["simulate", "--examples", "1", "--reps", "50", "--seed", "7", "--format", "csv"])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Outcome {
    let t0 = Instant::now();
    let runs = [simulate_csv(None), simulate_csv(None), simulate_csv(Some("1")), simulate_csv(Some("2"))];
    let same = runs.iter().all(|r| *r == runs[0]);
    timed(
        Duration::from_secs(600),
        same && !runs[0].is_empty(),
        format!("4 runs, {} bytes, identical: {same}", runs[0].len()),
        t0,
    )
}

fn consistency() -> Outcome {
    let t0 = Instant::now();
    let rows = consistency_harness(&design_example(1).unwrap(), &[50, 200, 800], 200, 12345, 1.0, 0.5).unwrap();
    let stats: Vec<f64> = rows.iter().map(|r| r.median_stat).collect();
    let (lo, hi) = stats.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    let listed: Vec<String> = rows.iter().map(|r| format!("n={}: {:.3}", r.n, r.median_stat)).collect();
    timed(
        Duration::from_secs(600),
        hi / lo < 2.0,
        format!("{} (ratio {:.2})", listed.join(", "), hi / lo),
        t0,
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1  reduction identities", reductions),
        ("2  LASSO vs sign enumeration", lasso_oracle),
        ("3a augmented Gram identity", gram_identity),
        ("3b naive loss vs reformulated objective", loss_differences),
        ("4  orthonormal risk formula", orthonormal_risk),
        ("5  universal-threshold bound", universal_bound),
        ("6  l1 biasing choice vs grid", choose_d_grid),
        ("7  simulation study", simulation_study),
        ("8  real-data cross-validation", real_data_cv),
        ("9  determinism across runs and threads", determinism),
        ("10 sqrt(n) consistency harness", consistency),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        let tag = match o.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => {
                failed += 1;
                "FAIL"
            }
            Verdict::Skip => "SKIP",
        };
        println!("{tag} criterion {name}: {}", o.detail);
    }
    println!("acceptance: {failed} criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
