//! Sure joint screening by sparsity-restricted maximum partial likelihood,
//! computed with iterative hard thresholding, and the two-stage estimator
//! that runs BAR on the screened columns.

use crate::bar::{fit_bar, BarConfig};
use crate::data::SurvivalDataset;
use crate::error::{CoxError, Result};
use crate::likelihood::LinearPredictorState;
use crate::solver::{ccd_minimize, FitResult, PenaltySpec, SolverOptions};

const MAX_STEP_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenOptions {
    pub max_iter: usize,
    /// Solver used to polish the estimate on the kept set.
    pub solver: SolverOptions,
}

impl Default for ScreenOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenResult {
    /// Kept columns, ascending.
    pub selected: Vec<usize>,
    /// Restricted estimate (length p, zero outside `selected`).
    pub beta: Vec<f64>,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Indices of the `m` largest magnitudes; equal magnitudes keep the smaller
/// index. Returned ascending.
pub fn top_m(values: &[f64], m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    idx.truncate(m);
    idx.sort_unstable();
    idx
}

fn loglik_at(ds: &SurvivalDataset, beta: &[f64]) -> f64 {
    match LinearPredictorState::new(ds, beta) {
        Ok(mut st) => st.log_partial_likelihood(ds),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Unpenalized CCD on the kept columns starting from `start`. Falls back to
/// `start` if the restricted problem fails numerically.
fn polish(ds: &SurvivalDataset, kept: &[usize], start: &[f64], opts: &SolverOptions) -> Result<Vec<f64>> {
    let view = ds.select_columns(kept)?;
    let sub_start: Vec<f64> = kept.iter().map(|&j| start[j]).collect();
    let mut beta = vec![0.0; ds.p()];
    match ccd_minimize(&view, &PenaltySpec::unpenalized(kept.len()), &sub_start, opts) {
        Ok(fit) => {
            for (&j, b) in kept.iter().zip(fit.beta) {
                beta[j] = b;
            }
        }
        Err(_) => {
            for &j in kept {
                beta[j] = start[j];
            }
        }
    }
    Ok(beta)
}

/// Keeps at most `m` columns by iterative hard thresholding of gradient
/// ascent steps on the log-partial likelihood, polishing each kept set.
pub fn sjs_screen(ds: &SurvivalDataset, m: usize, opts: &ScreenOptions) -> Result<ScreenResult> {
    let p = ds.p();
    if m == 0 || m > p {
        return Err(CoxError::invalid(format!(
            "screen size m = {m} must lie in 1..={p}"
        )));
    }
    if ds.event_count() == 0 {
        return Err(CoxError::NoEvents);
    }
    let mut beta = vec![0.0; p];
    let mut loglik = loglik_at(ds, &beta);
    let mut kept: Option<Vec<usize>> = None;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let grad = LinearPredictorState::new(ds, &beta)?.full_gradient(ds);
        let mut candidate = None;
        let mut eta = 1.0;
        for _ in 0..=MAX_STEP_HALVINGS {
            let stepped: Vec<f64> = beta.iter().zip(&grad).map(|(b, g)| b + eta * g).collect();
            let keep = top_m(&stepped, m);
            let mut thresholded = vec![0.0; p];
            for &j in &keep {
                thresholded[j] = stepped[j];
            }
            let l = loglik_at(ds, &thresholded);
            if l >= loglik {
                candidate = Some((keep, thresholded));
                break;
            }
            eta /= 2.0;
        }
        let Some((keep, thresholded)) = candidate else {
            // no step size improves the likelihood
            break;
        };
        let polished = polish(ds, &keep, &thresholded, &opts.solver)?;
        let l = loglik_at(ds, &polished);
        let repeated = kept.as_deref() == Some(&keep[..]);
        beta = polished;
        loglik = l;
        kept = Some(keep);
        if repeated {
            converged = true;
            break;
        }
    }

    let selected = kept.unwrap_or_else(|| top_m(&beta, m));
    Ok(ScreenResult {
        selected,
        beta,
        loglik,
        iterations,
        converged,
    })
}

/// Two-stage fit: screen to `m` columns, run BAR on the screened view and
/// embed the coefficients back into length `p` with exact zeros elsewhere.
pub fn sjs_coxbar(
    ds: &SurvivalDataset,
    m: usize,
    config: &BarConfig,
    opts: &ScreenOptions,
) -> Result<(FitResult, ScreenResult)> {
    let screen = sjs_screen(ds, m, opts)?;
    let view = ds.select_columns(&screen.selected)?;
    let sub = fit_bar(&view, config)?;
    let mut beta = vec![0.0; ds.p()];
    for (&j, &b) in screen.selected.iter().zip(&sub.beta) {
        beta[j] = b;
    }
    let fit = FitResult {
        support: sub.support.iter().map(|&k| screen.selected[k]).collect(),
        beta,
        ..sub
    };
    Ok((fit, screen))
}
