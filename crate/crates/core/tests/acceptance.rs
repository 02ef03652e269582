//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Failing criteria are reported but only fail the run when
//! `COXBAR_ACCEPTANCE_STRICT=1` is set. `COXBAR_ACCEPTANCE_ONLY=1,4` limits the
//! run to the listed criteria.

mod common;

use std::time::Instant;

use common::{golden_section, random_beta, random_dataset, Dense};
use coxbar::bar::bar_step;
use coxbar::sim::{report_csv, run_replicate};
use coxbar::{
    ccd_minimize, fit_bar, fit_ridge, grouping_bound_check, path_over, simulate, sjs_coxbar, BarConfig,
    BenchOptions, DesignKind, LinearPredictorState, Method, MethodConfig, PathAxis, PenaltySpec,
    ScreenOptions, SimScenario, SolverOptions, StandardizeMode, SurvivalDataset,
};
use rayon::prelude::*;

type Criterion = (usize, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn table1(n: usize, reps: usize, method: Method) -> coxbar::BenchRow {
    let sc = SimScenario::moderate(n, 100, 2024);
    coxbar::run_benchmark(
        &sc,
        &MethodConfig::new(method),
        reps,
        2024 + n as u64,
        BenchOptions::default(),
    )
    .expect("benchmark")
}

fn row_summary(r: &coxbar::BenchRow) -> String {
    format!(
        "{} SSB {:.4} FP {:.3} FN {:.3} TM {:.2} ({} failed)",
        r.method, r.ssb, r.fp, r.fn_, r.tm, r.failed
    )
}

fn criterion_1() -> Outcome {
    let r = table1(1000, 100, Method::BicCoxBar);
    let pass = r.failed == 0 && r.ssb <= 0.04 && r.fp <= 0.10 && r.fn_ <= 0.15 && r.tm >= 0.85;
    outcome(pass, row_summary(&r))
}

fn criterion_2() -> Outcome {
    let rows = [
        table1(300, 100, Method::BicCoxBar),
        table1(300, 100, Method::CbicCoxBar),
    ];
    let pass = rows
        .iter()
        .all(|r| r.failed == 0 && r.fp <= 0.5 && r.fn_ <= 1.2 && r.tm >= 0.10 && r.ssb <= 0.15);
    outcome(pass, rows.iter().map(row_summary).collect::<Vec<_>>().join("; "))
}

fn criterion_3() -> Outcome {
    let ds = simulate(&SimScenario::moderate(300, 100, 3))
        .unwrap()
        .standardize(StandardizeMode::CenterAndScale)
        .unwrap();
    let grid = coxbar::sim::log_grid(1e-3, 1e2, 25);
    let path = path_over(&ds, PathAxis::Xi, &grid, &BarConfig::default()).unwrap();
    let supports: Vec<Option<Vec<usize>>> = path
        .points
        .iter()
        .map(|pt| pt.fit.as_ref().ok().map(|f| f.support.clone()))
        .collect();
    let first = supports[0].clone();
    let pass = first.is_some() && supports.iter().all(|s| *s == first);
    let distinct: std::collections::BTreeSet<_> = supports.iter().collect();
    outcome(
        pass,
        format!(
            "{} grid points, {} distinct support sets, first {:?}",
            grid.len(),
            distinct.len(),
            first
        ),
    )
}

fn peak_rss_mb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

fn criterion_4() -> Outcome {
    let mut beta0 = Vec::with_capacity(2000);
    for v in [0.7, 0.5, 1.0, -0.7, -0.5, -1.0] {
        beta0.extend(std::iter::repeat_n(v, 6));
    }
    beta0.resize(2000, 0.0);
    let sc = SimScenario {
        n: 20_000,
        beta0,
        design: DesignKind::SparseBinary { sparsity: 0.98 },
        target_censoring: 0.95,
        seed: 20_000,
    };
    let start = Instant::now();
    let (m, _) = match run_replicate(&sc, &MethodConfig::new(Method::BicCoxBar)) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("fit failed: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let recovered = 36 - m.fn_;
    let dense_mb = 20_000.0 * 2000.0 * 8.0 / (1024.0 * 1024.0);
    let peak = peak_rss_mb();
    let sparse_memory = peak.is_none_or(|mb| mb < dense_mb);
    let pass = recovered >= 33 && m.fp <= 3 && secs < 600.0 && sparse_memory;
    outcome(
        pass,
        format!(
            "recovered {recovered}/36, FP {}, {secs:.1} s, peak RSS {} MB (dense design alone {dense_mb:.0} MB)",
            m.fp,
            peak.map_or("n/a".into(), |p| format!("{p:.0}"))
        ),
    )
}

fn criterion_5() -> Outcome {
    let base = SimScenario::moderate(300, 2500, 5);
    let truth = base.true_support();
    let results: Vec<(bool, usize, usize)> = (0..100usize)
        .into_par_iter()
        .map(|r| {
            let sc = SimScenario {
                seed: coxbar::sim::replicate_seed(5, r),
                ..base.clone()
            };
            let ds = simulate(&sc).unwrap();
            let opts = ScreenOptions::default();
            let (fit, screen) = sjs_coxbar(&ds, 52, &BarConfig::default(), &opts).unwrap();
            let covered = truth.iter().all(|j| screen.selected.contains(j));
            let m = coxbar::score(&fit.beta, &sc.beta0).unwrap();
            (covered, m.fp, m.fn_)
        })
        .collect();
    let coverage = results.iter().filter(|r| r.0).count() as f64 / 100.0;
    let fp = results.iter().map(|r| r.1 as f64).sum::<f64>() / 100.0;
    let fn_ = results.iter().map(|r| r.2 as f64).sum::<f64>() / 100.0;
    outcome(
        coverage >= 0.90 && fn_ <= 1.5 && fp <= 3.0,
        format!("coverage {coverage:.2}, SJS-BIC-CoxBAR FP {fp:.2} FN {fn_:.2}"),
    )
}

fn property_checks() -> Vec<(&'static str, bool, String)> {
    let mut out = Vec::new();

    // finite differences
    let mut worst: f64 = 0.0;
    for seed in 0..200u64 {
        let p = 1 + (seed as usize % 4);
        let ds = random_dataset(seed, 10 + (seed as usize % 20), p, 0.6);
        let beta = random_beta(seed, p, 0.8);
        let dense = Dense::from_dataset(&ds);
        let mut st = LinearPredictorState::new(&ds, &beta).unwrap();
        for j in 0..p {
            let d = st.coord_derivatives(&ds, j);
            let h = 1e-5;
            let (mut up, mut dn) = (beta.clone(), beta.clone());
            up[j] += h;
            dn[j] -= h;
            let fd1 = (dense.loglik(&up) - dense.loglik(&dn)) / (2.0 * h);
            let gu = LinearPredictorState::new(&ds, &up)
                .unwrap()
                .coord_derivatives(&ds, j)
                .g1;
            let gd = LinearPredictorState::new(&ds, &dn)
                .unwrap()
                .coord_derivatives(&ds, j)
                .g1;
            let fd2 = (gu - gd) / (2.0 * h);
            worst = worst
                .max((d.g1 - fd1).abs() / d.g1.abs().max(1.0))
                .max((d.g2 - fd2).abs() / d.g2.abs().max(1.0));
        }
    }
    out.push((
        "finite differences",
        worst <= 1e-5,
        format!("max rel err {worst:.2e}"),
    ));

    // sparse scan vs dense
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let ds = random_dataset(700 + seed, 40, 5, 0.3)
            .standardize(StandardizeMode::CenterAndScale)
            .unwrap();
        let beta = random_beta(seed, 5, 1.0);
        let dense = Dense::from_dataset(&ds);
        let (g, h) = (dense.gradient(&beta), dense.hessian(&beta));
        let mut st = LinearPredictorState::new(&ds, &beta).unwrap();
        for j in 0..5 {
            let d = st.coord_derivatives(&ds, j);
            worst = worst
                .max((d.g1 - g[j]).abs() / g[j].abs().max(1.0))
                .max((d.g2 - h[j][j]).abs() / h[j][j].abs().max(1.0));
        }
    }
    out.push((
        "sparse vs dense derivatives",
        worst <= 1e-10,
        format!("max rel err {worst:.2e}"),
    ));

    // monotone descent and zero-locking over BAR fits
    let mut max_increase = f64::NEG_INFINITY;
    let mut resurrected = 0;
    let mut phi_zero_ok = true;
    for seed in 0..20u64 {
        let ds = simulate(&SimScenario::moderate(300, 50, 900 + seed)).unwrap();
        let cfg = BarConfig::default();
        let lambda = (ds.n() as f64).ln();
        let ridge = fit_ridge(&ds, cfg.xi, &cfg.solver).unwrap();
        max_increase = max_increase.max(ridge.max_step_increase);
        let mut beta = ridge.beta;
        for _ in 0..cfg.outer_max {
            let next = bar_step(&ds, &beta, lambda, &cfg).unwrap();
            max_increase = max_increase.max(next.max_step_increase);
            resurrected += next
                .beta
                .iter()
                .zip(&beta)
                .filter(|(n, o)| **o == 0.0 && **n != 0.0)
                .count();
            let change = next
                .beta
                .iter()
                .zip(&beta)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            beta = next.beta;
            if change < cfg.outer_tol {
                break;
            }
        }
        let b = random_beta(seed, 1, 3.0)[0];
        phi_zero_ok &= b + coxbar::solver::stabilized_coord_step(b, 2.0, -1.5, 0.0) == 0.0;
    }
    out.push((
        "monotone descent",
        max_increase <= 1e-12,
        format!("largest accepted objective change {max_increase:.2e}"),
    ));
    out.push((
        "zero-lock and phi = 0 step",
        resurrected == 0 && phi_zero_ok,
        format!("{resurrected} resurrected coordinates"),
    ));

    // 1D golden-section oracle
    let tight = SolverOptions {
        tol_obj: 1e-15,
        tol_beta: 1e-12,
        ..SolverOptions::default()
    };
    let mut worst: f64 = 0.0;
    for seed in 0..30u64 {
        let ds = random_dataset(300 + seed, 30, 1, 0.8);
        let dense = Dense::from_dataset(&ds);
        for w in [0.0, 1.0, 5.0] {
            let fit = ccd_minimize(&ds, &PenaltySpec::uniform(1, w).unwrap(), &[0.0], &tight).unwrap();
            if w == 0.0 && fit.beta[0].abs() > 10.0 {
                continue;
            }
            let oracle = golden_section(|b| -2.0 * dense.loglik(&[b]) + w * b * b, -20.0, 20.0, 1e-10);
            worst = worst.max((fit.beta[0] - oracle).abs());
        }
    }
    out.push((
        "1D golden-section oracle",
        worst <= 1e-6,
        format!("max abs err {worst:.2e}"),
    ));

    // grouping bound
    let violations: usize = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let ds = simulate(&SimScenario::moderate(300, 100, 5000 + seed))
                .unwrap()
                .standardize(StandardizeMode::CenterAndScale)
                .unwrap();
            let fit = fit_bar(&ds, &BarConfig::default()).unwrap();
            grouping_bound_check(&fit, &ds, (ds.n() as f64).ln())
                .violations
                .len()
        })
        .sum();
    let dup = duplicated_column_gap();
    out.push((
        "grouping bound",
        violations == 0 && dup.is_none_or(|g| g <= 1e-6),
        format!(
            "{violations} violations over 100 replicates; duplicated pair {}",
            dup.map_or("collapsed to one copy".into(), |g| format!("gap {g:.2e}"))
        ),
    ));

    // determinism across reruns and thread counts
    let sc = SimScenario::moderate(200, 30, 1);
    let method = MethodConfig::new(Method::SjsBicCoxBar);
    let opts = BenchOptions { timing: false };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| report_csv(&[coxbar::run_benchmark(&sc, &method, 8, 77, opts).unwrap()]))
    };
    let (a, b, c) = (run(1), run(4), run(4));
    out.push((
        "seed and thread determinism",
        a == b && b == c,
        "threads 1 vs 4, rerun".into(),
    ));
    out
}

/// |b_i - b_j| for an exactly duplicated column when both copies stay nonzero.
fn duplicated_column_gap() -> Option<f64> {
    let base = simulate(&SimScenario::moderate(300, 10, 8)).unwrap();
    let cols: Vec<Vec<f64>> = (0..10)
        .map(|j| base.raw_column_dense(j))
        .chain(std::iter::once(base.raw_column_dense(9)))
        .collect();
    let ds = SurvivalDataset::from_columns(base.time().to_vec(), base.status().to_vec(), &cols)
        .unwrap()
        .standardize(StandardizeMode::CenterAndScale)
        .unwrap();
    let fit = fit_bar(&ds, &BarConfig::default()).unwrap();
    let (a, b) = (fit.beta[9], fit.beta[10]);
    (a != 0.0 && b != 0.0).then(|| (a - b).abs())
}

fn criterion_6() -> Outcome {
    let checks = property_checks();
    let pass = checks.iter().all(|c| c.1);
    let detail = checks
        .iter()
        .map(|(name, ok, d)| format!("{name} {} ({d})", if *ok { "ok" } else { "FAILED" }))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(pass, detail)
}

fn main() {
    let strict = std::env::var("COXBAR_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let only: Option<Vec<usize>> = std::env::var("COXBAR_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let criteria: [Criterion; 6] = [
        (1, "moderate-dimension selection, n = 1000", criterion_1),
        (2, "moderate-dimension selection, n = 300", criterion_2),
        (3, "xi insensitivity of the support", criterion_3),
        (4, "scaled sparse high-dimensional run", criterion_4),
        (5, "joint screening, p = 2500", criterion_5),
        (6, "property suite", criterion_6),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        println!(
            "criterion {id} [{}] {name}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {failed} criteria failed");
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
