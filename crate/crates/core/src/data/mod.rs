//! Right-censored survival samples with a sparse column-oriented design.
//!
//! Subjects are kept in two coordinate systems. *Subject index* is the input
//! row order. *Position* is the rank in the risk-set order: times descending,
//! events before censorings at equal times, then input order. Every risk set
//! `{j : time_j >= time_i}` is a prefix of positions, which is what lets the
//! likelihood kernels work with running sums.

mod io;
mod matrix;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use io::{load_dataset, save_dataset, DesignFormat};
pub use matrix::{Column, SparseColumnMatrix};

use crate::error::{CoxError, Result};

/// One distinct event time: all events sharing it use the risk set
/// `positions[0..=risk_end]` (Breslow ties).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventGroup {
    pub risk_end: usize,
    pub events: usize,
}

#[derive(Debug)]
struct Samples {
    ids: Vec<String>,
    time: Vec<f64>,
    status: Vec<u8>,
    order: Vec<usize>,
    rank: Vec<usize>,
    groups: Vec<EventGroup>,
    event_count: usize,
}

/// Immutable right-censored sample. Cheap to clone; column subsets share
/// the underlying storage.
#[derive(Debug, Clone)]
pub struct SurvivalDataset {
    samples: Arc<Samples>,
    design: SparseColumnMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StandardizeMode {
    #[default]
    None,
    ScaleOnly,
    CenterAndScale,
}

impl FromStr for StandardizeMode {
    type Err = CoxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "scale" | "scale-only" => Ok(Self::ScaleOnly),
            "center" | "center-and-scale" => Ok(Self::CenterAndScale),
            other => Err(CoxError::invalid(format!(
                "unknown standardization mode `{other}`"
            ))),
        }
    }
}

impl fmt::Display for StandardizeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::ScaleOnly => "scale-only",
            Self::CenterAndScale => "center-and-scale",
        })
    }
}

/// Outcome of [`SurvivalDataset::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub first_violation: Option<String>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.first_violation.is_none()
    }
}

fn sort_order(time: &[f64], status: &[u8]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..time.len()).collect();
    // stable: equal keys keep input order
    order.sort_by(|&a, &b| {
        time[b]
            .total_cmp(&time[a])
            .then_with(|| status[b].cmp(&status[a]))
    });
    order
}

fn event_groups(time: &[f64], status: &[u8], order: &[usize]) -> Vec<EventGroup> {
    let mut groups = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let t = time[order[start]];
        let mut end = start;
        while end + 1 < order.len() && time[order[end + 1]] == t {
            end += 1;
        }
        let events = order[start..=end].iter().filter(|&&i| status[i] == 1).count();
        if events > 0 {
            groups.push(EventGroup {
                risk_end: end,
                events,
            });
        }
        start = end + 1;
    }
    groups
}

impl SurvivalDataset {
    /// Builds a dataset from subject-indexed times and statuses plus
    /// `(subject, column, value)` triplets. Zero values are dropped.
    pub fn from_triplets(
        ids: Option<Vec<String>>,
        time: Vec<f64>,
        status: Vec<u8>,
        p: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let n = time.len();
        if status.len() != n {
            return Err(CoxError::invalid(format!(
                "{} times but {} status values",
                n,
                status.len()
            )));
        }
        if let Some((i, t)) = time
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.is_finite() && **t > 0.0))
        {
            return Err(CoxError::invalid(format!(
                "nonpositive time {t} for subject {}",
                i + 1
            )));
        }
        if let Some(i) = status.iter().position(|&s| s > 1) {
            return Err(CoxError::invalid(format!(
                "status outside {{0,1}} for subject {}",
                i + 1
            )));
        }
        if n > u32::MAX as usize {
            return Err(CoxError::invalid("more than 2^32 subjects"));
        }
        let ids = match ids {
            Some(ids) if ids.len() == n => ids,
            Some(ids) => return Err(CoxError::invalid(format!("{} ids for {} subjects", ids.len(), n))),
            None => (1..=n).map(|i| i.to_string()).collect(),
        };

        let order = sort_order(&time, &status);
        let mut rank = vec![0; n];
        for (pos, &i) in order.iter().enumerate() {
            rank[i] = pos;
        }
        let groups = event_groups(&time, &status, &order);
        let event_count = status.iter().filter(|&&s| s == 1).count();
        let status_by_pos: Vec<bool> = order.iter().map(|&i| status[i] == 1).collect();

        let design = SparseColumnMatrix::build(n, p, &rank, &status_by_pos, triplets)?;
        Ok(Self {
            samples: Arc::new(Samples {
                ids,
                time,
                status,
                order,
                rank,
                groups,
                event_count,
            }),
            design,
        })
    }

    /// Dense convenience constructor; `columns[j][i]` is subject `i`'s value
    /// for covariate `j`.
    pub fn from_columns(time: Vec<f64>, status: Vec<u8>, columns: &[Vec<f64>]) -> Result<Self> {
        let n = time.len();
        if let Some(j) = columns.iter().position(|c| c.len() != n) {
            return Err(CoxError::invalid(format!("column {} has wrong length", j + 1)));
        }
        let triplets = columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().enumerate().map(move |(i, &v)| (i, j, v)));
        Self::from_triplets(None, time, status, columns.len(), triplets)
    }

    pub fn n(&self) -> usize {
        self.samples.time.len()
    }

    pub fn p(&self) -> usize {
        self.design.ncols()
    }

    pub fn ids(&self) -> &[String] {
        &self.samples.ids
    }

    /// Observed times by subject index.
    pub fn time(&self) -> &[f64] {
        &self.samples.time
    }

    /// Event indicators by subject index.
    pub fn status(&self) -> &[u8] {
        &self.samples.status
    }

    /// Position -> subject index.
    pub fn order(&self) -> &[usize] {
        &self.samples.order
    }

    /// Subject index -> position.
    pub fn rank(&self) -> &[usize] {
        &self.samples.rank
    }

    pub fn event_count(&self) -> usize {
        self.samples.event_count
    }

    pub fn groups(&self) -> &[EventGroup] {
        &self.samples.groups
    }

    pub fn censoring_rate(&self) -> f64 {
        1.0 - self.event_count() as f64 / self.n() as f64
    }

    pub fn design(&self) -> &SparseColumnMatrix {
        &self.design
    }

    pub fn column(&self, j: usize) -> Column<'_> {
        self.design.column(j)
    }

    pub fn nnz(&self) -> usize {
        (0..self.p()).map(|j| self.column(j).nnz()).sum()
    }

    /// Represented values of column `j` by subject index.
    pub fn column_dense(&self, j: usize) -> Vec<f64> {
        let col = self.column(j);
        let fill = col.value_at_zero();
        let mut out = vec![fill; self.n()];
        for (&pos, &v) in col.positions.iter().zip(col.values) {
            out[self.samples.order[pos as usize]] = col.represent(v);
        }
        out
    }

    /// Raw input values of column `j` by subject index.
    pub fn raw_column_dense(&self, j: usize) -> Vec<f64> {
        let col = self.column(j);
        let mut out = vec![0.0; self.n()];
        for (&pos, &v) in col.positions.iter().zip(col.values) {
            out[self.samples.order[pos as usize]] = v;
        }
        out
    }

    /// A view restricted to `columns` (in the given order). No entries are copied.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        Ok(Self {
            samples: Arc::clone(&self.samples),
            design: self.design.select(columns)?,
        })
    }

    /// Maps coefficients fitted on the represented (standardized) columns
    /// back to the raw covariate scale.
    pub fn to_original_scale(&self, beta: &[f64]) -> Vec<f64> {
        beta.iter()
            .enumerate()
            .map(|(j, &b)| if b == 0.0 { 0.0 } else { b / self.column(j).scale })
            .collect()
    }

    /// Standardization metadata is always computed from the raw values, so
    /// applying the same mode twice is a no-op.
    pub fn standardize(&self, mode: StandardizeMode) -> Result<Self> {
        if mode == StandardizeMode::None {
            return Ok(self.clone());
        }
        let n = self.n();
        if n < 2 {
            return Err(CoxError::invalid("standardization needs at least two subjects"));
        }
        let nf = n as f64;
        let mut center = Vec::with_capacity(self.p());
        let mut scale = Vec::with_capacity(self.p());
        for j in 0..self.p() {
            let col = self.column(j);
            let sumsq: f64 = col.values.iter().map(|v| v * v).sum();
            match mode {
                StandardizeMode::ScaleOnly => {
                    let rms = (sumsq / nf).sqrt();
                    center.push(0.0);
                    scale.push(if rms > 0.0 { rms } else { 1.0 });
                }
                StandardizeMode::CenterAndScale => {
                    let mean = col.values.iter().sum::<f64>() / nf;
                    let ss = col.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                        + (n - col.nnz()) as f64 * mean * mean;
                    if ss <= 1e-20 * (1.0 + sumsq) {
                        return Err(CoxError::ConstantColumn { column: j + 1 });
                    }
                    center.push(mean);
                    scale.push((ss / (nf - 1.0)).sqrt());
                }
                StandardizeMode::None => unreachable!(),
            }
        }
        Ok(Self {
            samples: Arc::clone(&self.samples),
            design: self.design.with_metadata(center, scale),
        })
    }

    /// Checks every structural invariant and reports the first violation.
    pub fn validate(&self) -> ValidationReport {
        ValidationReport {
            first_violation: self.first_violation(),
        }
    }

    fn first_violation(&self) -> Option<String> {
        let s = &self.samples;
        let n = s.time.len();
        if s.status.len() != n || s.order.len() != n || s.rank.len() != n || s.ids.len() != n {
            return Some("length mismatch between sample vectors".into());
        }
        if let Some(i) = s.time.iter().position(|t| !(t.is_finite() && *t > 0.0)) {
            return Some(format!("nonpositive time at subject {}", i + 1));
        }
        if let Some(i) = s.status.iter().position(|&v| v > 1) {
            return Some(format!("status outside {{0,1}} at subject {}", i + 1));
        }
        let mut seen = vec![false; n];
        for &i in &s.order {
            if i >= n || seen[i] {
                return Some("order is not a permutation".into());
            }
            seen[i] = true;
        }
        for k in 1..n {
            let (a, b) = (s.order[k - 1], s.order[k]);
            if s.time[a] < s.time[b] {
                return Some(format!("order not sorted at position {k}"));
            }
            if s.time[a] == s.time[b] && s.status[a] < s.status[b] {
                return Some(format!("censoring before event among ties at position {k}"));
            }
        }
        if s.order.iter().enumerate().any(|(pos, &i)| s.rank[i] != pos) {
            return Some("rank is not the inverse of order".into());
        }
        if event_groups(&s.time, &s.status, &s.order) != s.groups {
            return Some("event groups inconsistent with order".into());
        }
        if s.status.iter().filter(|&&v| v == 1).count() != s.event_count {
            return Some("event count mismatch".into());
        }
        self.design.first_violation(n)
    }
}
