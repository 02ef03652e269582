//! Broken adaptive ridge: a ridge start followed by ridge refits whose
//! weights are `lambda / |beta_prev|^(2 - d)`, iterated to a fixed point.
//! Coefficients that fall below the zero threshold are locked at exactly 0.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::data::SurvivalDataset;
use crate::error::{CoxError, Result};
use crate::solver::{ccd_minimize, FitResult, InformationCriteria, PenaltySpec, SolverOptions};

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaRule {
    Fixed(f64),
    /// `lambda = ln n`
    Bic,
    /// `lambda = ln(number of events)`
    Cbic,
    /// Pick the best of several fixed values by BIC.
    Grid(Vec<f64>),
}

impl LambdaRule {
    /// The penalty for a fixed rule; `None` for a grid.
    pub fn resolve(&self, n: usize, events: usize) -> Option<f64> {
        match self {
            LambdaRule::Fixed(l) => Some(*l),
            LambdaRule::Bic => Some((n as f64).ln()),
            LambdaRule::Cbic => Some((events as f64).ln()),
            LambdaRule::Grid(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Aic,
    Bic,
    Cbic,
}

impl Criterion {
    pub fn score(self, ic: &InformationCriteria) -> f64 {
        match self {
            Criterion::Aic => ic.aic,
            Criterion::Bic => ic.bic,
            Criterion::Cbic => ic.cbic,
        }
    }
}

impl FromStr for Criterion {
    type Err = CoxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aic" => Ok(Self::Aic),
            "bic" => Ok(Self::Bic),
            "cbic" => Ok(Self::Cbic),
            other => Err(CoxError::invalid(format!("unknown criterion `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarConfig {
    /// Ridge penalty of the starting fit.
    pub xi: f64,
    pub lambda_rule: LambdaRule,
    /// Exponent of the L_d generalization; 0 gives the L0 surrogate.
    pub d: f64,
    /// Magnitudes below this after an outer step are locked to 0.
    pub zero_threshold: f64,
    pub outer_max: usize,
    pub outer_tol: f64,
    pub solver: SolverOptions,
}

impl Default for BarConfig {
    fn default() -> Self {
        Self {
            xi: 1.0,
            lambda_rule: LambdaRule::Bic,
            d: 0.0,
            zero_threshold: 1e-8,
            outer_max: 200,
            outer_tol: 1e-6,
            solver: SolverOptions::default(),
        }
    }
}

impl BarConfig {
    fn check(&self) -> Result<()> {
        if !(self.xi.is_finite() && self.xi > 0.0) {
            return Err(CoxError::invalid(format!("xi must be positive, got {}", self.xi)));
        }
        if !(0.0..=1.0).contains(&self.d) {
            return Err(CoxError::invalid(format!("d must lie in [0, 1], got {}", self.d)));
        }
        if self.zero_threshold.is_nan() || self.zero_threshold <= 0.0 {
            return Err(CoxError::invalid("zero threshold must be positive"));
        }
        match &self.lambda_rule {
            LambdaRule::Fixed(l) if !(l.is_finite() && *l >= 0.0) => {
                Err(CoxError::invalid(format!("lambda must be nonnegative, got {l}")))
            }
            LambdaRule::Grid(g) if g.is_empty() || g.iter().any(|l| !(l.is_finite() && *l > 0.0)) => {
                Err(CoxError::invalid("lambda grid must be nonempty and positive"))
            }
            _ => Ok(()),
        }
    }
}

pub fn information_criteria(fit: &FitResult, n: usize, events: usize) -> InformationCriteria {
    let deviance = -2.0 * fit.loglik;
    let df = fit.df as f64;
    InformationCriteria {
        aic: deviance + 2.0 * df,
        bic: deviance + (n as f64).ln() * df,
        cbic: deviance + (events as f64).ln() * df,
    }
}

/// Ridge fit `argmin -2 l + xi |beta|^2` from zero.
pub fn fit_ridge(ds: &SurvivalDataset, xi: f64, opts: &SolverOptions) -> Result<FitResult> {
    if !(xi.is_finite() && xi > 0.0) {
        return Err(CoxError::invalid(format!("xi must be positive, got {xi}")));
    }
    let penalty = PenaltySpec::uniform(ds.p(), xi)?;
    let mut fit = ccd_minimize(ds, &penalty, &vec![0.0; ds.p()], opts)?;
    fit.criteria = Some(information_criteria(&fit, ds.n(), ds.event_count()));
    Ok(fit)
}

/// The reweighted penalty built from the previous iterate. Zero coefficients
/// are frozen.
pub fn bar_penalty(beta_prev: &[f64], lambda: f64, d: f64) -> PenaltySpec {
    let frozen: Vec<bool> = beta_prev.iter().map(|&b| b == 0.0).collect();
    let weights = beta_prev
        .iter()
        .map(|&b| {
            if b == 0.0 || lambda == 0.0 {
                0.0
            } else {
                lambda / b.abs().powf(2.0 - d)
            }
        })
        .collect();
    PenaltySpec::new(weights, frozen).expect("weights are finite for nonzero coefficients")
}

fn lock_small(beta: &mut [f64], threshold: f64) {
    for b in beta.iter_mut() {
        if b.abs() < threshold {
            *b = 0.0;
        }
    }
}

/// One outer step: the weighted ridge solve warm-started at `beta_prev`,
/// followed by zero-locking.
pub fn bar_step(
    ds: &SurvivalDataset,
    beta_prev: &[f64],
    lambda: f64,
    config: &BarConfig,
) -> Result<FitResult> {
    let penalty = bar_penalty(beta_prev, lambda, config.d);
    let mut fit = ccd_minimize(ds, &penalty, beta_prev, &config.solver)?;
    lock_small(&mut fit.beta, config.zero_threshold);
    let mut locked = FitResult::from_beta(ds, std::mem::take(&mut fit.beta), &penalty)?;
    locked.sweeps = fit.sweeps;
    locked.converged = fit.converged;
    locked.max_step_increase = fit.max_step_increase;
    Ok(locked)
}

fn fit_bar_fixed(ds: &SurvivalDataset, lambda: f64, config: &BarConfig) -> Result<FitResult> {
    let ridge = fit_ridge(ds, config.xi, &config.solver)?;
    let mut beta = ridge.beta;
    lock_small(&mut beta, config.zero_threshold);
    let mut sweeps = ridge.sweeps;
    let mut max_step_increase = ridge.max_step_increase;
    let mut inner_converged = ridge.converged;
    let mut outer_converged = false;
    let mut last = None;
    let mut k = 0;
    while k < config.outer_max {
        k += 1;
        let fit = bar_step(ds, &beta, lambda, config)?;
        debug_assert!(fit
            .beta
            .iter()
            .zip(&beta)
            .all(|(new, old)| *old != 0.0 || *new == 0.0));
        sweeps += fit.sweeps;
        max_step_increase = max_step_increase.max(fit.max_step_increase);
        inner_converged = fit.converged;
        let change = fit
            .beta
            .iter()
            .zip(&beta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        beta.clone_from(&fit.beta);
        last = Some(fit);
        if change < config.outer_tol {
            outer_converged = true;
            break;
        }
    }
    let mut fit = match last {
        Some(fit) => fit,
        None => FitResult::from_beta(ds, beta, &bar_penalty(&[], lambda, config.d))?,
    };
    fit.sweeps = sweeps;
    fit.outer_iterations = k;
    fit.converged = outer_converged && inner_converged;
    fit.max_step_increase = max_step_increase;
    fit.criteria = Some(information_criteria(&fit, ds.n(), ds.event_count()));
    Ok(fit)
}

/// Broken adaptive ridge fit under `config`. A grid rule is resolved by BIC.
pub fn fit_bar(ds: &SurvivalDataset, config: &BarConfig) -> Result<FitResult> {
    config.check()?;
    if ds.event_count() == 0 {
        return Err(CoxError::NoEvents);
    }
    match config.lambda_rule.resolve(ds.n(), ds.event_count()) {
        Some(lambda) => fit_bar_fixed(ds, lambda, config),
        None => {
            let LambdaRule::Grid(grid) = &config.lambda_rule else {
                unreachable!()
            };
            Ok(fit_bar_grid(ds, grid, Criterion::Bic, config)?.best)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathAxis {
    Lambda,
    Xi,
}

impl FromStr for PathAxis {
    type Err = CoxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(Self::Lambda),
            "xi" => Ok(Self::Xi),
            other => Err(CoxError::invalid(format!("unknown path axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub tuning: f64,
    pub fit: std::result::Result<FitResult, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub axis: PathAxis,
    pub points: Vec<PathPoint>,
}

impl PathResult {
    /// CSV with header `tuning,converged,df,loglik,aic,bic,cbic,beta_1..beta_p`.
    /// Failed points carry `error` in the `converged` column and empty fields.
    pub fn to_csv(&self, p: usize) -> String {
        let mut out = String::from("tuning,converged,df,loglik,aic,bic,cbic");
        for j in 1..=p {
            let _ = write!(out, ",beta_{j}");
        }
        out.push('\n');
        for point in &self.points {
            let _ = write!(out, "{:.16e}", point.tuning);
            match &point.fit {
                Ok(fit) => {
                    let ic = fit.criteria.expect("path fits carry information criteria");
                    let _ = write!(
                        out,
                        ",{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                        fit.converged, fit.df, fit.loglik, ic.aic, ic.bic, ic.cbic
                    );
                    for b in &fit.beta {
                        let _ = write!(out, ",{b:.16e}");
                    }
                }
                Err(_) => {
                    out.push_str(",error");
                    for _ in 0..5 + p {
                        out.push(',');
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

fn check_ascending(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(CoxError::invalid("tuning grid is empty"));
    }
    if grid
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        || grid.iter().any(|v| !v.is_finite())
    {
        return Err(CoxError::invalid(
            "tuning grid must be finite and strictly increasing",
        ));
    }
    Ok(())
}

/// One BAR fit per grid value along `axis`, fanned out over the rayon pool.
/// Per-point failures are recorded and the path continues.
pub fn path_over(
    ds: &SurvivalDataset,
    axis: PathAxis,
    grid: &[f64],
    config: &BarConfig,
) -> Result<PathResult> {
    check_ascending(grid)?;
    let points = grid
        .par_iter()
        .map(|&tuning| {
            let mut cfg = config.clone();
            match axis {
                PathAxis::Lambda => cfg.lambda_rule = LambdaRule::Fixed(tuning),
                PathAxis::Xi => cfg.xi = tuning,
            }
            PathPoint {
                tuning,
                fit: fit_bar(ds, &cfg).map_err(|e| e.to_string()),
            }
        })
        .collect();
    Ok(PathResult { axis, points })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFit {
    pub best: FitResult,
    pub best_lambda: f64,
    pub path: PathResult,
}

/// Fits every `lambda` in the grid and keeps the criterion minimizer
/// (ties go to the smaller `lambda`).
pub fn fit_bar_grid(
    ds: &SurvivalDataset,
    grid: &[f64],
    criterion: Criterion,
    config: &BarConfig,
) -> Result<GridFit> {
    if grid.is_empty() || grid.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(CoxError::invalid("lambda grid must be nonempty and positive"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let fits: Vec<FitResult> = sorted
        .par_iter()
        .map(|&l| {
            let mut cfg = config.clone();
            cfg.lambda_rule = LambdaRule::Fixed(l);
            fit_bar(ds, &cfg)
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, fit) in fits.iter().enumerate() {
        let s = criterion.score(&fit.criteria.unwrap());
        if s < criterion.score(&fits[best].criteria.unwrap()) {
            best = i;
        }
    }
    let path = PathResult {
        axis: PathAxis::Lambda,
        points: sorted
            .iter()
            .zip(&fits)
            .map(|(&tuning, fit)| PathPoint {
                tuning,
                fit: Ok(fit.clone()),
            })
            .collect(),
    };
    Ok(GridFit {
        best: fits[best].clone(),
        best_lambda: sorted[best],
        path,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupingPair {
    pub i: usize,
    pub j: usize,
    pub correlation: f64,
    pub lhs: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupingReport {
    pub pairs: Vec<GroupingPair>,
    pub violations: Vec<GroupingPair>,
    /// Whether every column has mean 0 and `x.x = n - 1` (within 1e-8).
    pub standardized: bool,
}

impl GroupingReport {
    pub fn min_slack(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.bound - p.lhs)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates `|1/b_i - 1/b_j| <= sqrt(2 (n-1)(1 - r_ij)) sqrt(n (1 + d_n)^2) / lambda`
/// for every pair of nonzero coefficients, where `r_ij = x_i . x_j / (n - 1)`.
/// A pair counts as a violation when the left side exceeds the bound by more
/// than a coefficient-level tolerance of 1e-6.
pub fn grouping_bound_check(fit: &FitResult, ds: &SurvivalDataset, lambda: f64) -> GroupingReport {
    let n = ds.n() as f64;
    let dn = ds.event_count() as f64;
    let support: Vec<usize> = fit.support.clone();
    let cols: Vec<Vec<f64>> = support.iter().map(|&j| ds.column_dense(j)).collect();
    let standardized = (0..ds.p()).all(|j| {
        let x = ds.column_dense(j);
        let mean = x.iter().sum::<f64>() / n;
        let ss: f64 = x.iter().map(|v| v * v).sum();
        mean.abs() < 1e-8 && (ss - (n - 1.0)).abs() < 1e-8 * n
    });
    let mut pairs = Vec::new();
    for a in 0..support.len() {
        for b in a + 1..support.len() {
            let dot: f64 = cols[a].iter().zip(&cols[b]).map(|(x, y)| x * y).sum();
            let r = dot / (n - 1.0);
            let (bi, bj) = (fit.beta[support[a]], fit.beta[support[b]]);
            let lhs = (1.0 / bi - 1.0 / bj).abs();
            let bound = (2.0 * (n - 1.0) * (1.0 - r).max(0.0)).sqrt() * (n.sqrt() * (1.0 + dn)) / lambda;
            pairs.push(GroupingPair {
                i: support[a],
                j: support[b],
                correlation: r,
                lhs,
                bound,
            });
        }
    }
    let violations = pairs
        .iter()
        .filter(|pr| {
            let tol = 1e-6 / (fit.beta[pr.i] * fit.beta[pr.j]).abs();
            pr.lhs > pr.bound * (1.0 + 1e-12) + tol
        })
        .cloned()
        .collect();
    GroupingReport {
        pairs,
        violations,
        standardized,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_formula() {
        let fit = FitResult {
            beta: vec![],
            support: vec![],
            loglik: -500.0,
            objective: 0.0,
            sweeps: 0,
            outer_iterations: 0,
            converged: true,
            df: 5,
            criteria: None,
            max_step_increase: 0.0,
        };
        let ic = information_criteria(&fit, 1000, 800);
        assert!((ic.aic - 1010.0).abs() < 1e-12);
        assert!((ic.bic - (1000.0 + 5.0 * 1000f64.ln())).abs() < 1e-12);
        assert!((ic.bic - 1034.54).abs() < 5e-3);
        assert!((ic.cbic - 1033.42).abs() < 5e-3);
        let zero = FitResult { df: 0, ..fit };
        let ic = information_criteria(&zero, 1000, 800);
        assert_eq!((ic.aic, ic.bic, ic.cbic), (1000.0, 1000.0, 1000.0));
    }

    #[test]
    fn bar_penalty_freezes_zeros() {
        let pen = bar_penalty(&[0.5, 0.0, -2.0], 2.0, 0.0);
        assert_eq!(pen.weight(0), 8.0);
        assert!(pen.is_frozen(1));
        assert_eq!(pen.weight(2), 0.5);
        let pen = bar_penalty(&[0.25], 1.0, 1.0);
        assert_eq!(pen.weight(0), 4.0);
    }

    #[test]
    fn zero_design_gives_empty_support() {
        let ds =
            SurvivalDataset::from_columns(vec![1.0, 2.0, 3.0], vec![1, 0, 1], &[vec![0.0; 3], vec![0.0; 3]])
                .unwrap();
        let fit = fit_bar(&ds, &BarConfig::default()).unwrap();
        assert_eq!(fit.beta, vec![0.0, 0.0]);
        assert!(fit.support.is_empty());
        assert!(fit.converged);
        assert_eq!(fit.outer_iterations, 1);
        let ridge = fit_ridge(&ds, 1.0, &SolverOptions::default()).unwrap();
        assert_eq!(ridge.beta, vec![0.0, 0.0]);
    }

    #[test]
    fn no_events_is_an_error() {
        let ds = SurvivalDataset::from_columns(vec![1.0, 2.0], vec![0, 0], &[vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            fit_bar(&ds, &BarConfig::default()),
            Err(CoxError::NoEvents)
        ));
    }

    #[test]
    fn config_validation() {
        let ds = SurvivalDataset::from_columns(vec![1.0, 2.0], vec![1, 1], &[vec![1.0, 0.0]]).unwrap();
        for cfg in [
            BarConfig {
                xi: 0.0,
                ..BarConfig::default()
            },
            BarConfig {
                d: 1.5,
                ..BarConfig::default()
            },
            BarConfig {
                lambda_rule: LambdaRule::Fixed(-1.0),
                ..BarConfig::default()
            },
            BarConfig {
                lambda_rule: LambdaRule::Grid(vec![]),
                ..BarConfig::default()
            },
        ] {
            assert!(fit_bar(&ds, &cfg).is_err());
        }
    }

    #[test]
    fn path_grid_must_ascend() {
        let ds = SurvivalDataset::from_columns(vec![1.0, 2.0], vec![1, 1], &[vec![1.0, 0.0]]).unwrap();
        let cfg = BarConfig::default();
        assert!(path_over(&ds, PathAxis::Xi, &[1.0, 0.5], &cfg).is_err());
        assert!(path_over(&ds, PathAxis::Xi, &[], &cfg).is_err());
    }

    #[test]
    fn path_csv_layout() {
        let ds = SurvivalDataset::from_columns(
            vec![1.0, 2.0, 3.0, 4.0],
            vec![1, 1, 0, 1],
            &[vec![1.0, 0.0, -1.0, 0.5]],
        )
        .unwrap();
        let path = path_over(&ds, PathAxis::Xi, &[0.5, 1.0], &BarConfig::default()).unwrap();
        let csv = path.to_csv(1);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "tuning,converged,df,loglik,aic,bic,cbic,beta_1");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("5.0000000000000000e-1,"));
        assert_eq!(lines[1].split(',').count(), 8);
    }
}
