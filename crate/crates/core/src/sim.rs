//! Synthetic survival data, selection metrics and replicate benchmarks.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`; independent parts of a draw use separate streams
//! (0 design, 1 event times, 2 censoring times, 3 calibration pilot).
//! Replicate `r` of a benchmark uses seed `splitmix64(master ^ r)`.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Geometric, StandardNormal};
use rayon::prelude::*;

use crate::bar::{fit_bar, fit_bar_grid, BarConfig, Criterion, LambdaRule};
use crate::data::{StandardizeMode, SurvivalDataset};
use crate::error::{CoxError, Result};
use crate::screening::{sjs_coxbar, ScreenOptions};
use crate::solver::FitResult;

const PILOT_SIZE: usize = 50_000;
const BISECTION_STEPS: usize = 60;
const CALIBRATION_TOL: f64 = 0.005;

const STREAM_DESIGN: u64 = 0;
const STREAM_EVENTS: u64 = 1;
const STREAM_CENSORING: u64 = 2;
const STREAM_PILOT: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesignKind {
    /// Gaussian rows with `corr(x_i, x_j) = rho^|i-j|`.
    Ar1Gaussian { rho: f64 },
    /// Entries are 1 with probability `1 - sparsity`, else 0.
    SparseBinary { sparsity: f64 },
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignKind::Ar1Gaussian { rho } => write!(f, "ar1:{rho}"),
            DesignKind::SparseBinary { sparsity } => write!(f, "sparse:{sparsity}"),
        }
    }
}

impl FromStr for DesignKind {
    type Err = CoxError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').ok_or_else(|| {
            CoxError::invalid(format!("design `{s}` must look like ar1:0.5 or sparse:0.98"))
        })?;
        let value: f64 = arg
            .trim()
            .parse()
            .map_err(|_| CoxError::invalid(format!("malformed design parameter `{arg}`")))?;
        match kind.trim() {
            "ar1" => Ok(DesignKind::Ar1Gaussian { rho: value }),
            "sparse" | "sparse-binary" => Ok(DesignKind::SparseBinary { sparsity: value }),
            other => Err(CoxError::invalid(format!("unknown design kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub n: usize,
    pub beta0: Vec<f64>,
    pub design: DesignKind,
    pub target_censoring: f64,
    pub seed: u64,
}

/// Expands `0.7x10,0.5,0x3` into a coefficient list.
pub fn parse_beta_list(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (value, count) = match item.split_once('x') {
            Some((v, c)) => (
                v.trim(),
                c.trim()
                    .parse::<usize>()
                    .map_err(|_| CoxError::invalid(format!("malformed repeat count in `{item}`")))?,
            ),
            None => (item, 1),
        };
        let v: f64 = value
            .parse()
            .map_err(|_| CoxError::invalid(format!("malformed coefficient `{item}`")))?;
        out.extend(std::iter::repeat_n(v, count));
    }
    Ok(out)
}

impl SimScenario {
    pub fn p(&self) -> usize {
        self.beta0.len()
    }

    /// Truth `(0.20, 0, 0.35, 0, 0.50, 0.55, 0, 0, 0.70, 0.80, 0, ...)` on an
    /// AR(0.5) Gaussian design with 20% censoring.
    pub fn moderate(n: usize, p: usize, seed: u64) -> Self {
        let mut beta0 = vec![0.0; p.max(10)];
        beta0[..10].copy_from_slice(&[0.20, 0.0, 0.35, 0.0, 0.50, 0.55, 0.0, 0.0, 0.70, 0.80]);
        beta0.truncate(p);
        Self {
            n,
            beta0,
            design: DesignKind::Ar1Gaussian { rho: 0.5 },
            target_censoring: 0.2,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.beta0.is_empty() {
            return Err(CoxError::invalid("scenario needs n >= 1 and p >= 1"));
        }
        if self.beta0.iter().any(|b| !b.is_finite()) {
            return Err(CoxError::invalid("beta0 must be finite"));
        }
        if !(0.0..1.0).contains(&self.target_censoring) {
            return Err(CoxError::invalid(format!(
                "target censoring {} outside [0, 1)",
                self.target_censoring
            )));
        }
        match self.design {
            DesignKind::Ar1Gaussian { rho } if !(rho > -1.0 && rho < 1.0) => {
                Err(CoxError::invalid(format!("rho = {rho} outside (-1, 1)")))
            }
            DesignKind::SparseBinary { sparsity } if !(0.0..1.0).contains(&sparsity) => {
                Err(CoxError::invalid(format!("sparsity = {sparsity} outside [0, 1)")))
            }
            _ => Ok(()),
        }
    }

    /// Parses the flat `key=value` scenario format. `p` defaults to the
    /// length of `beta0`; a shorter `beta0` is padded with zeros.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let (mut n, mut p, mut beta0, mut design, mut censoring, mut seed) =
            (None, None, None, None, None, 0u64);
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CoxError::invalid(format!("line {}: expected key=value", ln + 1)))?;
            let value = value.trim();
            let bad = |what: &str| CoxError::invalid(format!("line {}: malformed {what} `{value}`", ln + 1));
            match key.trim() {
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad("n"))?),
                "p" => p = Some(value.parse::<usize>().map_err(|_| bad("p"))?),
                "beta0" => beta0 = Some(parse_beta_list(value)?),
                "design" => design = Some(value.parse::<DesignKind>()?),
                "censoring" => censoring = Some(value.parse::<f64>().map_err(|_| bad("censoring"))?),
                "seed" => seed = value.parse().map_err(|_| bad("seed"))?,
                other => {
                    return Err(CoxError::invalid(format!(
                        "line {}: unknown key `{other}`",
                        ln + 1
                    )))
                }
            }
        }
        let n = n.ok_or_else(|| CoxError::invalid("scenario is missing `n`"))?;
        let mut beta0 = beta0.ok_or_else(|| CoxError::invalid("scenario is missing `beta0`"))?;
        let p = p.unwrap_or(beta0.len());
        if beta0.len() > p {
            return Err(CoxError::invalid(format!(
                "beta0 has {} entries but p = {p}",
                beta0.len()
            )));
        }
        beta0.resize(p, 0.0);
        let scenario = Self {
            n,
            beta0,
            design: design.unwrap_or(DesignKind::Ar1Gaussian { rho: 0.5 }),
            target_censoring: censoring.unwrap_or(0.2),
            seed,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn true_support(&self) -> Vec<usize> {
        (0..self.p()).filter(|&j| self.beta0[j] != 0.0).collect()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn replicate_seed(master: u64, replicate: usize) -> u64 {
    splitmix64(master ^ replicate as u64)
}

/// Linear predictors of `count` fresh subjects; only the columns that carry
/// signal (and, for AR(1), the chain leading up to them) are drawn.
fn pilot_predictors(scenario: &SimScenario, count: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let support = scenario.true_support();
    let Some(&last) = support.last() else {
        return vec![0.0; count];
    };
    let beta = &scenario.beta0;
    match scenario.design {
        DesignKind::Ar1Gaussian { rho } => {
            let innov = (1.0 - rho * rho).sqrt();
            (0..count)
                .map(|_| {
                    let mut x: f64 = StandardNormal.sample(rng);
                    let mut eta = beta[0] * x;
                    for &b in &beta[1..=last] {
                        let z: f64 = StandardNormal.sample(rng);
                        x = rho * x + innov * z;
                        eta += b * x;
                    }
                    eta
                })
                .collect()
        }
        DesignKind::SparseBinary { sparsity } => {
            let density = 1.0 - sparsity;
            (0..count)
                .map(|_| {
                    support
                        .iter()
                        .filter(|_| rng.random::<f64>() < density)
                        .map(|&j| beta[j])
                        .sum()
                })
                .collect()
        }
    }
}

fn censored_fraction(event_times: &[f64], u_max: f64) -> f64 {
    event_times.iter().map(|&t| (t / u_max).min(1.0)).sum::<f64>() / event_times.len() as f64
}

/// Upper end `u_max` of the uniform censoring distribution that yields the
/// target censoring rate, by bisection on a pilot sample. `None` means no
/// censoring.
pub fn calibrate_u_max(scenario: &SimScenario) -> Result<Option<f64>> {
    scenario.validate()?;
    if scenario.target_censoring == 0.0 {
        return Ok(None);
    }
    let mut rng = stream_rng(scenario.seed, STREAM_PILOT);
    let etas = pilot_predictors(scenario, PILOT_SIZE, &mut rng);
    let times: Vec<f64> = etas
        .iter()
        .map(|&e| {
            let x: f64 = Exp1.sample(&mut rng);
            x / e.exp()
        })
        .collect();
    // censored fraction E[min(T / u, 1)] decreases in u
    let (mut lo, mut hi) = ((1e-12f64).ln(), (1e12f64).ln());
    let target = scenario.target_censoring;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if censored_fraction(&times, mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = (0.5 * (lo + hi)).exp();
    let achieved = censored_fraction(&times, u);
    if (achieved - target).abs() > CALIBRATION_TOL {
        return Err(CoxError::Calibration {
            target,
            achieved,
            min: censored_fraction(&times, 1e12),
            max: censored_fraction(&times, 1e-12),
        });
    }
    Ok(Some(u))
}

/// Draws a dataset: exponential event times with unit baseline hazard and
/// rate `exp(x . beta0)`, independent `U(0, u_max)` censoring.
pub fn simulate(scenario: &SimScenario) -> Result<SurvivalDataset> {
    scenario.validate()?;
    let u_max = calibrate_u_max(scenario)?;
    let (n, p) = (scenario.n, scenario.p());
    let beta = &scenario.beta0;
    let mut rng = stream_rng(scenario.seed, STREAM_DESIGN);
    let mut eta = vec![0.0; n];
    let mut triplets = Vec::new();
    match scenario.design {
        DesignKind::Ar1Gaussian { rho } => {
            let innov = (1.0 - rho * rho).sqrt();
            triplets.reserve(n * p);
            for (i, e) in eta.iter_mut().enumerate() {
                let mut x = 0.0;
                for (j, &b) in beta.iter().enumerate() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x = if j == 0 { z } else { rho * x + innov * z };
                    *e += b * x;
                    triplets.push((i, j, x));
                }
            }
        }
        DesignKind::SparseBinary { sparsity } => {
            let density = 1.0 - sparsity;
            let gap = Geometric::new(density).map_err(|e| CoxError::invalid(e.to_string()))?;
            for (j, &b) in beta.iter().enumerate() {
                let mut i = gap.sample(&mut rng) as usize;
                while i < n {
                    eta[i] += b;
                    triplets.push((i, j, 1.0));
                    i = i.saturating_add(1 + gap.sample(&mut rng) as usize);
                }
            }
        }
    }

    let mut ev_rng = stream_rng(scenario.seed, STREAM_EVENTS);
    let mut c_rng = stream_rng(scenario.seed, STREAM_CENSORING);
    let mut time = Vec::with_capacity(n);
    let mut status = Vec::with_capacity(n);
    for &e in &eta {
        let x: f64 = Exp1.sample(&mut ev_rng);
        let t = (x / e.exp()).max(f64::MIN_POSITIVE);
        match u_max {
            Some(u) => {
                let c = u * (1.0 - c_rng.random::<f64>());
                if t <= c {
                    time.push(t);
                    status.push(1);
                } else {
                    time.push(c);
                    status.push(0);
                }
            }
            None => {
                time.push(t);
                status.push(1);
            }
        }
    }
    SurvivalDataset::from_triplets(None, time, status, p, triplets)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionMetrics {
    /// Sum of squared errors over all coefficients.
    pub ssb: f64,
    /// Selected coefficients whose true value is zero.
    pub fp: usize,
    /// Truly nonzero coefficients estimated as zero.
    pub fn_: usize,
    /// Selected support equals the true support.
    pub tm: bool,
    /// True-support coefficients whose rank by |estimate| equals their rank by |truth|.
    pub acr: usize,
    /// One flag per true signal (ascending index): was it selected.
    pub inclusion: Vec<bool>,
    pub aic: Option<f64>,
    pub bic: Option<f64>,
}

/// Rank position of each index in `idx` when sorted by descending
/// magnitude, ties by index.
fn magnitude_ranks(idx: &[usize], values: &[f64]) -> Vec<usize> {
    let mut sorted: Vec<usize> = (0..idx.len()).collect();
    sorted.sort_by(|&a, &b| {
        values[idx[b]]
            .abs()
            .total_cmp(&values[idx[a]].abs())
            .then(a.cmp(&b))
    });
    let mut rank = vec![0; idx.len()];
    for (r, &k) in sorted.iter().enumerate() {
        rank[k] = r;
    }
    rank
}

pub fn score(beta_hat: &[f64], beta_true: &[f64]) -> Result<SelectionMetrics> {
    if beta_hat.len() != beta_true.len() {
        return Err(CoxError::invalid(format!(
            "estimate has length {} but truth has {}",
            beta_hat.len(),
            beta_true.len()
        )));
    }
    let ssb = beta_hat
        .iter()
        .zip(beta_true)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let truth: Vec<usize> = (0..beta_true.len()).filter(|&j| beta_true[j] != 0.0).collect();
    let fp = (0..beta_true.len())
        .filter(|&j| beta_true[j] == 0.0 && beta_hat[j] != 0.0)
        .count();
    let inclusion: Vec<bool> = truth.iter().map(|&j| beta_hat[j] != 0.0).collect();
    let fn_ = inclusion.iter().filter(|&&inc| !inc).count();
    let tm = (0..beta_true.len()).all(|j| (beta_true[j] != 0.0) == (beta_hat[j] != 0.0));
    assert_eq!(tm, fp == 0 && fn_ == 0, "true-model flag inconsistent with FP/FN");
    let (rt, rh) = (
        magnitude_ranks(&truth, beta_true),
        magnitude_ranks(&truth, beta_hat),
    );
    let acr = rt.iter().zip(&rh).filter(|(a, b)| a == b).count();
    Ok(SelectionMetrics {
        ssb,
        fp,
        fn_,
        tm,
        acr,
        inclusion,
        aic: None,
        bic: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// BAR with `lambda = ln n`.
    BicCoxBar,
    /// BAR with `lambda = ln d_n`.
    CbicCoxBar,
    /// BAR with `lambda` chosen by BIC over a grid.
    CoxBarBic,
    SjsBicCoxBar,
    SjsCbicCoxBar,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::BicCoxBar => "bic-coxbar",
            Method::CbicCoxBar => "cbic-coxbar",
            Method::CoxBarBic => "coxbar-bic",
            Method::SjsBicCoxBar => "sjs-bic-coxbar",
            Method::SjsCbicCoxBar => "sjs-cbic-coxbar",
        }
    }
}

impl FromStr for Method {
    type Err = CoxError;

    fn from_str(s: &str) -> Result<Self> {
        [
            Method::BicCoxBar,
            Method::CbicCoxBar,
            Method::CoxBarBic,
            Method::SjsBicCoxBar,
            Method::SjsCbicCoxBar,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| CoxError::invalid(format!("unknown method `{s}`")))
    }
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Default grid for the BIC-tuned method: 20 values in `[0.05, 2] * ln n`.
pub fn default_lambda_grid(n: usize) -> Vec<f64> {
    let l = (n as f64).ln();
    log_grid(0.05 * l, 2.0 * l, 20)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig {
    pub method: Method,
    /// `xi`, `d`, thresholds and solver options; the lambda rule is set by `method`.
    pub bar: BarConfig,
    /// Screen size for the two-stage methods; defaults to `floor(n / ln n)`.
    pub screen_m: Option<usize>,
    pub lambda_grid: Option<Vec<f64>>,
}

impl MethodConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            bar: BarConfig::default(),
            screen_m: None,
            lambda_grid: None,
        }
    }

    /// Fits the method to a dataset.
    pub fn fit(&self, ds: &SurvivalDataset) -> Result<FitResult> {
        let mut cfg = self.bar.clone();
        match self.method {
            Method::BicCoxBar | Method::CbicCoxBar => {
                cfg.lambda_rule = if self.method == Method::BicCoxBar {
                    LambdaRule::Bic
                } else {
                    LambdaRule::Cbic
                };
                fit_bar(ds, &cfg)
            }
            Method::CoxBarBic => {
                let grid = self
                    .lambda_grid
                    .clone()
                    .unwrap_or_else(|| default_lambda_grid(ds.n()));
                Ok(fit_bar_grid(ds, &grid, Criterion::Bic, &cfg)?.best)
            }
            Method::SjsBicCoxBar | Method::SjsCbicCoxBar => {
                cfg.lambda_rule = if self.method == Method::SjsBicCoxBar {
                    LambdaRule::Bic
                } else {
                    LambdaRule::Cbic
                };
                let n = ds.n() as f64;
                let m = self
                    .screen_m
                    .unwrap_or_else(|| (n / n.ln()).floor() as usize)
                    .clamp(1, ds.p());
                let opts = ScreenOptions {
                    solver: cfg.solver.clone(),
                    ..ScreenOptions::default()
                };
                Ok(sjs_coxbar(ds, m, &cfg, &opts)?.0)
            }
        }
    }
}

/// One simulated replicate: generate, fit, score.
pub fn run_replicate(scenario: &SimScenario, method: &MethodConfig) -> Result<(SelectionMetrics, f64)> {
    let ds = simulate(scenario)?;
    let ds = match scenario.design {
        DesignKind::SparseBinary { .. } => ds.standardize(StandardizeMode::ScaleOnly)?,
        DesignKind::Ar1Gaussian { .. } => ds,
    };
    let start = Instant::now();
    let fit = method.fit(&ds)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let beta = ds.to_original_scale(&fit.beta);
    let mut metrics = score(&beta, &scenario.beta0)?;
    if let Some(ic) = fit.criteria {
        metrics.aic = Some(ic.aic);
        metrics.bic = Some(ic.bic);
    }
    Ok((metrics, elapsed))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: String,
    pub reps: usize,
    pub failed: usize,
    pub ssb: f64,
    pub fp: f64,
    pub fn_: f64,
    pub tm: f64,
    pub acr: f64,
    pub aic: f64,
    pub bic: f64,
    pub mean_runtime_ms: Option<f64>,
    /// Inclusion frequency of each true signal, labelled by its 1-based index.
    pub inclusion: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    /// Record wall-clock time per fit; the only nondeterministic column.
    pub timing: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { timing: true }
    }
}

/// Runs `replicates` independent simulate-fit-score rounds in parallel and
/// averages the metrics. Failed replicates are excluded and counted.
pub fn run_benchmark(
    scenario: &SimScenario,
    method: &MethodConfig,
    replicates: usize,
    seed: u64,
    opts: BenchOptions,
) -> Result<BenchRow> {
    if replicates == 0 {
        return Err(CoxError::invalid("replicates must be at least 1"));
    }
    scenario.validate()?;
    let outcomes: Vec<Result<(SelectionMetrics, f64)>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let sc = SimScenario {
                seed: replicate_seed(seed, r),
                ..scenario.clone()
            };
            run_replicate(&sc, method)
        })
        .collect();
    let ok: Vec<&(SelectionMetrics, f64)> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let count = ok.len() as f64;
    let mean = |f: &dyn Fn(&SelectionMetrics) -> f64| ok.iter().map(|(m, _)| f(m)).sum::<f64>() / count;
    let truth = scenario.true_support();
    Ok(BenchRow {
        method: method.method.name().to_string(),
        reps: replicates,
        failed: replicates - ok.len(),
        ssb: mean(&|m| m.ssb),
        fp: mean(&|m| m.fp as f64),
        fn_: mean(&|m| m.fn_ as f64),
        tm: mean(&|m| f64::from(u8::from(m.tm))),
        acr: mean(&|m| m.acr as f64),
        aic: mean(&|m| m.aic.unwrap_or(f64::NAN)),
        bic: mean(&|m| m.bic.unwrap_or(f64::NAN)),
        mean_runtime_ms: opts
            .timing
            .then(|| ok.iter().map(|(_, t)| t).sum::<f64>() / count),
        inclusion: truth
            .iter()
            .enumerate()
            .map(|(k, &j)| (j + 1, mean(&|m| f64::from(u8::from(m.inclusion[k])))))
            .collect(),
    })
}

/// Report CSV: `method,reps,SSB,FP,FN,TM,ACR,AIC,BIC,mean_runtime_ms,failed`
/// followed by one `P_<index>` inclusion column per true signal. All rows must
/// share the same truth vector.
pub fn report_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "# ACR = number of true-support coefficients whose rank by |estimate| equals their rank by |truth|\n",
    );
    out.push_str("method,reps,SSB,FP,FN,TM,ACR,AIC,BIC,mean_runtime_ms,failed");
    if let Some(first) = rows.first() {
        for (j, _) in &first.inclusion {
            let _ = write!(out, ",P_{j}");
        }
    }
    out.push('\n');
    for r in rows {
        let runtime = r
            .mean_runtime_ms
            .map_or_else(|| "NA".to_string(), |t| format!("{t:.3}"));
        let _ = write!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
            r.method, r.reps, r.ssb, r.fp, r.fn_, r.tm, r.acr, r.aic, r.bic, runtime, r.failed
        );
        for (_, pr) in &r.inclusion {
            let _ = write!(out, ",{pr:.6}");
        }
        out.push('\n');
    }
    out
}
