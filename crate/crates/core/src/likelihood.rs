//! Breslow log-partial likelihood and its coordinate-wise derivatives.
//!
//! With subjects in risk-set order, every risk-set denominator is a prefix
//! sum of `exp(eta)`. A coordinate's first and second derivatives need the
//! running sums of `x * exp(eta)` and `x^2 * exp(eta)` over that column's
//! nonzero entries only, so a scan starts at the column's first nonzero
//! position and touches `nnz + (event groups after it)` entries.

use rayon::prelude::*;

use crate::data::{Column, SurvivalDataset};
use crate::error::{CoxError, Result};

/// Largest linear predictor whose exponential is finite.
const MAX_ETA: f64 = 709.782712893384;

/// First and second derivative of the log-partial likelihood along one
/// coordinate. `g2 <= 0` always.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordDerivatives {
    pub g1: f64,
    pub g2: f64,
}

/// Linear predictors and risk-set denominators for a coefficient vector.
///
/// `eta` holds the uncentered part `sum_j beta_j * x_raw / scale_j` in
/// position order; the true linear predictor is `eta - offset()`. A common
/// shift cancels in the partial likelihood, so centered columns never need
/// dense updates.
#[derive(Debug, Clone)]
pub struct LinearPredictorState {
    beta: Vec<f64>,
    eta: Vec<f64>,
    w: Vec<f64>,
    denom: Vec<f64>,
    /// First position whose `denom` entry is out of date; `n` when fresh.
    stale_from: usize,
    offset: f64,
    event_eta: f64,
}

impl LinearPredictorState {
    /// Builds a consistent state for `beta` from scratch.
    pub fn new(ds: &SurvivalDataset, beta: &[f64]) -> Result<Self> {
        if beta.len() != ds.p() {
            return Err(CoxError::invalid(format!(
                "coefficient vector has length {} but p = {}",
                beta.len(),
                ds.p()
            )));
        }
        if let Some(j) = beta.iter().position(|b| !b.is_finite()) {
            return Err(CoxError::invalid(format!("coefficient {} is not finite", j + 1)));
        }
        let n = ds.n();
        let mut state = Self {
            beta: beta.to_vec(),
            eta: vec![0.0; n],
            w: vec![1.0; n],
            denom: vec![0.0; n],
            stale_from: 0,
            offset: 0.0,
            event_eta: 0.0,
        };
        state.recompute(ds)?;
        Ok(state)
    }

    fn recompute(&mut self, ds: &SurvivalDataset) -> Result<()> {
        self.eta.fill(0.0);
        self.offset = 0.0;
        for (j, &b) in self.beta.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            let col = ds.column(j);
            let scaled = b / col.scale;
            for (&pos, &v) in col.positions.iter().zip(col.values) {
                self.eta[pos as usize] += v * scaled;
            }
            self.offset += col.center * scaled;
        }
        let order = ds.order();
        if let Some(pos) = self.eta.iter().position(|&e| e > MAX_ETA || e.is_nan()) {
            return Err(CoxError::Overflow {
                subject: order[pos] + 1,
                eta: self.eta[pos],
            });
        }
        for (w, &e) in self.w.iter_mut().zip(&self.eta) {
            *w = e.exp();
        }
        let status = ds.status();
        self.event_eta = order
            .iter()
            .zip(&self.eta)
            .filter(|(&i, _)| status[i] == 1)
            .map(|(_, &e)| e)
            .sum();
        self.stale_from = 0;
        self.refresh();
        Ok(())
    }

    /// Recomputes everything from `beta`, discarding accumulated rounding.
    pub fn full_refresh(&mut self, ds: &SurvivalDataset) -> Result<()> {
        self.recompute(ds)
    }

    /// Brings the stale suffix of the denominators up to date.
    pub fn refresh(&mut self) {
        let n = self.w.len();
        let mut acc = if self.stale_from == 0 {
            0.0
        } else {
            self.denom[self.stale_from - 1]
        };
        for k in self.stale_from..n {
            acc += self.w[k];
            self.denom[k] = acc;
        }
        self.stale_from = n;
    }

    pub fn is_fresh(&self) -> bool {
        self.stale_from == self.w.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn into_beta(self) -> Vec<f64> {
        self.beta
    }

    /// Uncentered linear predictors in position order.
    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `exp(eta)` in position order.
    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Prefix sums of [`weights`](Self::weights). Call [`refresh`](Self::refresh) first
    /// if updates were applied.
    pub fn denominators(&self) -> &[f64] {
        &self.denom
    }

    /// True linear predictors `x_i . beta` by position.
    pub fn linear_predictors(&self) -> Vec<f64> {
        self.eta.iter().map(|e| e - self.offset).collect()
    }

    /// Breslow log-partial likelihood.
    pub fn log_partial_likelihood(&mut self, ds: &SurvivalDataset) -> f64 {
        self.refresh();
        let log_denoms: f64 = ds
            .groups()
            .iter()
            .map(|g| g.events as f64 * self.denom[g.risk_end].ln())
            .sum();
        self.event_eta - log_denoms
    }

    fn scan(&self, ds: &SurvivalDataset, col: &Column<'_>) -> (f64, f64) {
        debug_assert!(self.is_fresh());
        let Some(&first) = col.positions.first() else {
            return (0.0, 0.0);
        };
        let groups = ds.groups();
        let start = groups.partition_point(|g| g.risk_end < first as usize);
        let (mut k, mut x_acc, mut q_acc) = (0, 0.0, 0.0);
        let (mut mean_sum, mut var_sum) = (0.0, 0.0);
        for g in &groups[start..] {
            while k < col.positions.len() && col.positions[k] as usize <= g.risk_end {
                let v = col.values[k];
                let wv = self.w[col.positions[k] as usize] * v;
                x_acc += wv;
                q_acc += wv * v;
                k += 1;
            }
            let d = self.denom[g.risk_end];
            let m = x_acc / d;
            let cnt = g.events as f64;
            mean_sum += cnt * m;
            var_sum += cnt * (q_acc / d - m * m).max(0.0);
        }
        (mean_sum, var_sum)
    }

    fn derivatives_fresh(&self, ds: &SurvivalDataset, j: usize) -> CoordDerivatives {
        let col = ds.column(j);
        if col.is_empty() {
            return CoordDerivatives { g1: 0.0, g2: 0.0 };
        }
        let (mean_sum, var_sum) = self.scan(ds, &col);
        CoordDerivatives {
            g1: (col.event_sum - mean_sum) / col.scale,
            g2: -var_sum / (col.scale * col.scale),
        }
    }

    /// First and second derivative of the log-partial likelihood in `beta_j`.
    pub fn coord_derivatives(&mut self, ds: &SurvivalDataset, j: usize) -> CoordDerivatives {
        self.refresh();
        self.derivatives_fresh(ds, j)
    }

    /// Gradient of the log-partial likelihood; columns are evaluated in parallel.
    pub fn full_gradient(&mut self, ds: &SurvivalDataset) -> Vec<f64> {
        self.refresh();
        let this = &*self;
        (0..ds.p())
            .into_par_iter()
            .map(|j| this.derivatives_fresh(ds, j).g1)
            .collect()
    }

    /// `l(beta + delta e_j) - l(beta)` without modifying the state. Returns a
    /// non-finite value when the trial point overflows.
    pub fn loglik_change(&mut self, ds: &SurvivalDataset, j: usize, delta: f64) -> f64 {
        self.refresh();
        let col = ds.column(j);
        if delta == 0.0 || col.is_empty() {
            return 0.0;
        }
        let scaled = delta / col.scale;
        let groups = ds.groups();
        let first = col.positions[0] as usize;
        let start = groups.partition_point(|g| g.risk_end < first);
        let (mut k, mut c_acc, mut log_change) = (0, 0.0, 0.0);
        for g in &groups[start..] {
            while k < col.positions.len() && col.positions[k] as usize <= g.risk_end {
                let pos = col.positions[k] as usize;
                c_acc += self.w[pos] * (col.values[k] * scaled).exp_m1();
                k += 1;
            }
            log_change += g.events as f64 * (c_acc / self.denom[g.risk_end]).ln_1p();
        }
        scaled * col.event_sum - log_change
    }

    /// Low-rank update `beta_j += delta`. Only rows with a nonzero in column
    /// `j` change; denominators are marked stale from the first of them. On
    /// overflow the state is left untouched.
    pub fn apply_coord_update(&mut self, ds: &SurvivalDataset, j: usize, delta: f64) -> Result<()> {
        if !delta.is_finite() {
            return Err(CoxError::invalid(format!(
                "non-finite update for coefficient {}",
                j + 1
            )));
        }
        if delta == 0.0 {
            return Ok(());
        }
        let col = ds.column(j);
        let scaled = delta / col.scale;
        if let Some((&pos, _)) = col
            .positions
            .iter()
            .zip(col.values)
            .find(|(&pos, &v)| self.eta[pos as usize] + v * scaled > MAX_ETA)
        {
            let pos = pos as usize;
            return Err(CoxError::Overflow {
                subject: ds.order()[pos] + 1,
                eta: self.eta[pos],
            });
        }
        for (&pos, &v) in col.positions.iter().zip(col.values) {
            let pos = pos as usize;
            self.eta[pos] += v * scaled;
            self.w[pos] = self.eta[pos].exp();
        }
        if let Some(&first) = col.positions.first() {
            self.stale_from = self.stale_from.min(first as usize);
        }
        self.beta[j] += delta;
        self.offset += col.center * scaled;
        self.event_eta += col.event_sum * scaled;
        Ok(())
    }

    /// Largest relative deviation of the maintained `eta` and denominators
    /// from a from-scratch recomputation.
    pub fn drift(&mut self, ds: &SurvivalDataset) -> Result<f64> {
        self.refresh();
        let fresh = Self::new(ds, &self.beta)?;
        let rel = |a: f64, b: f64| (a - b).abs() / (1.0 + b.abs());
        let eta = self
            .eta
            .iter()
            .zip(&fresh.eta)
            .map(|(&a, &b)| rel(a, b))
            .fold(0.0, f64::max);
        let denom = self
            .denom
            .iter()
            .zip(&fresh.denom)
            .map(|(&a, &b)| (a - b).abs() / b)
            .fold(0.0, f64::max);
        Ok(eta.max(denom))
    }
}
