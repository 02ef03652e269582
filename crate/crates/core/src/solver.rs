//! Cyclic coordinate descent for `F(beta) = -2 l(beta) + sum_j w_j beta_j^2`.
//!
//! Each visit to a coordinate takes one Newton step on the one-dimensional
//! restriction of `F`, clamped to a per-coordinate trust radius, and only
//! accepts it if `F` does not increase (halving otherwise).

use crate::data::SurvivalDataset;
use crate::error::{CoxError, Result};
use crate::likelihood::LinearPredictorState;

/// Added to the curvature of unpenalized coordinates so a flat direction
/// yields a large (then clamped) step instead of a division by zero.
const CURVATURE_GUARD: f64 = 1e-12;
const MAX_HALVINGS: usize = 30;

/// Per-coordinate quadratic penalty weights with zero-locked coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySpec {
    weights: Vec<f64>,
    frozen: Vec<bool>,
}

impl PenaltySpec {
    pub fn new(weights: Vec<f64>, frozen: Vec<bool>) -> Result<Self> {
        if weights.len() != frozen.len() {
            return Err(CoxError::invalid(
                "penalty weights and frozen flags differ in length",
            ));
        }
        if let Some(j) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(CoxError::invalid(format!(
                "penalty weight {} is {} (must be finite and nonnegative)",
                j + 1,
                weights[j]
            )));
        }
        Ok(Self { weights, frozen })
    }

    pub fn uniform(p: usize, weight: f64) -> Result<Self> {
        Self::new(vec![weight; p], vec![false; p])
    }

    pub fn unpenalized(p: usize) -> Self {
        Self {
            weights: vec![0.0; p],
            frozen: vec![false; p],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn is_frozen(&self, j: usize) -> bool {
        self.frozen[j]
    }

    pub fn penalty(&self, beta: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(beta)
            .map(|(w, b)| if *w == 0.0 { 0.0 } else { w * b * b })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_sweeps: usize,
    /// Relative objective change per sweep.
    pub tol_obj: f64,
    /// Largest coefficient change in a sweep.
    pub tol_beta: f64,
    pub initial_radius: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 1000,
            tol_obj: 1e-8,
            tol_beta: 1e-6,
            initial_radius: 1.0,
        }
    }
}

/// Aggregate information criteria of a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InformationCriteria {
    pub aic: f64,
    pub bic: f64,
    pub cbic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub beta: Vec<f64>,
    pub support: Vec<usize>,
    pub loglik: f64,
    /// Penalized objective at `beta` under the last penalty used.
    pub objective: f64,
    pub sweeps: usize,
    /// Outer reweighting iterations (0 for a plain solve).
    pub outer_iterations: usize,
    pub converged: bool,
    pub df: usize,
    pub criteria: Option<InformationCriteria>,
    /// Largest objective increase over all accepted coordinate steps.
    pub max_step_increase: f64,
}

impl FitResult {
    pub(crate) fn from_beta(ds: &SurvivalDataset, beta: Vec<f64>, penalty: &PenaltySpec) -> Result<Self> {
        let mut state = LinearPredictorState::new(ds, &beta)?;
        let loglik = state.log_partial_likelihood(ds);
        let support: Vec<usize> = (0..beta.len()).filter(|&j| beta[j] != 0.0).collect();
        Ok(Self {
            objective: -2.0 * loglik + penalty.penalty(&beta),
            df: support.len(),
            support,
            beta,
            loglik,
            sweeps: 0,
            outer_iterations: 0,
            converged: true,
            criteria: None,
            max_step_increase: f64::NEG_INFINITY,
        })
    }
}

/// Newton step of the one-dimensional objective written with the prior
/// variance `phi = 1 / w`, which only multiplies by `phi`:
/// `(phi g1 - beta) / (1 - phi g2)`. With `phi = 0` the new value is exactly 0.
pub fn stabilized_coord_step(beta_j: f64, g1: f64, g2: f64, phi: f64) -> f64 {
    if phi == 0.0 {
        return -beta_j;
    }
    (phi * g1 - beta_j) / (1.0 - phi * g2)
}

/// Minimizes `-2 l(beta) + sum_j w_j beta_j^2` by cyclic coordinate descent
/// starting from `beta0`.
pub fn ccd_minimize(
    ds: &SurvivalDataset,
    penalty: &PenaltySpec,
    beta0: &[f64],
    opts: &SolverOptions,
) -> Result<FitResult> {
    let p = ds.p();
    if penalty.len() != p || beta0.len() != p {
        return Err(CoxError::invalid(format!(
            "dimension mismatch: p = {p}, penalty has {}, beta0 has {}",
            penalty.len(),
            beta0.len()
        )));
    }
    let mut start = beta0.to_vec();
    for (j, b) in start.iter_mut().enumerate() {
        if penalty.is_frozen(j) && *b != 0.0 {
            return Err(CoxError::invalid(format!(
                "frozen coefficient {} is nonzero",
                j + 1
            )));
        }
        // an empty column does not enter the likelihood
        if ds.column(j).is_empty() {
            *b = 0.0;
        }
    }
    let mut state = LinearPredictorState::new(ds, &start)?;
    let mut objective = -2.0 * state.log_partial_likelihood(ds) + penalty.penalty(state.beta());
    if !objective.is_finite() {
        return Err(CoxError::NonFiniteObjective { column: 0, sweep: 0 });
    }
    let active: Vec<usize> = (0..p)
        .filter(|&j| !penalty.is_frozen(j) && !ds.column(j).is_empty())
        .collect();
    let mut radius = vec![opts.initial_radius; p];
    let mut max_step_increase = f64::NEG_INFINITY;
    let mut converged = false;
    let mut sweeps = 0;

    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let sweep_start = objective;
        let mut max_change: f64 = 0.0;
        for &j in &active {
            let w = penalty.weight(j);
            let beta_j = state.beta()[j];
            let d = state.coord_derivatives(ds, j);
            let phi = 1.0 / w;
            let mut step = if phi.is_finite() {
                stabilized_coord_step(beta_j, d.g1, d.g2, phi)
            } else {
                d.g1 / (CURVATURE_GUARD - d.g2)
            };
            step = step.clamp(-radius[j], radius[j]);
            if step == 0.0 {
                radius[j] = (radius[j] / 2.0).max(f64::MIN_POSITIVE);
                continue;
            }
            let mut accepted = None;
            let mut any_finite = false;
            for _ in 0..=MAX_HALVINGS {
                let dl = state.loglik_change(ds, j, step);
                let nb = beta_j + step;
                let dpen = if w > 0.0 {
                    w * (nb * nb - beta_j * beta_j)
                } else {
                    0.0
                };
                let df = -2.0 * dl + dpen;
                if df.is_finite() {
                    any_finite = true;
                    if df <= 0.0 {
                        accepted = Some((step, df));
                        break;
                    }
                }
                step /= 2.0;
            }
            match accepted {
                Some((step, df)) => {
                    state.apply_coord_update(ds, j, step)?;
                    max_step_increase = max_step_increase.max(df);
                    max_change = max_change.max(step.abs());
                    radius[j] = (2.0 * step.abs()).max(radius[j] / 2.0);
                }
                None if !any_finite => {
                    return Err(CoxError::NonFiniteObjective {
                        column: j + 1,
                        sweep: sweeps,
                    });
                }
                None => {
                    radius[j] = (radius[j] / 2.0).max(f64::MIN_POSITIVE);
                }
            }
        }
        state.full_refresh(ds)?;
        objective = -2.0 * state.log_partial_likelihood(ds) + penalty.penalty(state.beta());
        if !objective.is_finite() {
            return Err(CoxError::NonFiniteObjective {
                column: 0,
                sweep: sweeps,
            });
        }
        let rel = (sweep_start - objective).abs() / objective.abs().max(1.0);
        if rel < opts.tol_obj && max_change < opts.tol_beta {
            converged = true;
            break;
        }
    }

    let mut fit = FitResult::from_beta(ds, state.into_beta(), penalty)?;
    fit.sweeps = sweeps;
    fit.converged = converged || active.is_empty();
    fit.max_step_increase = max_step_increase;
    Ok(fit)
}
