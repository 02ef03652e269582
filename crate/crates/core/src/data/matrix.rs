use std::sync::Arc;

use crate::error::{CoxError, Result};

#[derive(Debug)]
struct CscStorage {
    col_ptr: Vec<usize>,
    positions: Vec<u32>,
    values: Vec<f64>,
    /// Sum of raw values over event subjects, per stored column.
    event_sum: Vec<f64>,
}

/// Column-compressed design whose row coordinate is the risk-set position.
///
/// Entries hold raw input values. A represented column is
/// `(x - center) / scale`; centering is never materialized, so a column's
/// implicit zero entries represent `-center / scale`.
#[derive(Debug, Clone)]
pub struct SparseColumnMatrix {
    storage: Arc<CscStorage>,
    selection: Option<Arc<[usize]>>,
    center: Vec<f64>,
    scale: Vec<f64>,
}

/// Borrowed view of one column.
#[derive(Debug, Clone, Copy)]
pub struct Column<'a> {
    /// Strictly ascending risk-set positions of the nonzero raw entries.
    pub positions: &'a [u32],
    pub values: &'a [f64],
    pub center: f64,
    pub scale: f64,
    /// Raw sum over event subjects.
    pub event_sum: f64,
}

impl Column<'_> {
    pub fn nnz(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn represent(&self, raw: f64) -> f64 {
        (raw - self.center) / self.scale
    }

    pub fn value_at_zero(&self) -> f64 {
        if self.center == 0.0 {
            0.0
        } else {
            -self.center / self.scale
        }
    }
}

impl SparseColumnMatrix {
    pub(super) fn build(
        n: usize,
        p: usize,
        rank: &[usize],
        is_event: &[bool],
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut cols: Vec<Vec<(u32, f64)>> = vec![Vec::new(); p];
        for (i, j, v) in triplets {
            if i >= n || j >= p {
                return Err(CoxError::invalid(format!(
                    "entry ({}, {}) outside a {n} x {p} design",
                    i + 1,
                    j + 1
                )));
            }
            if !v.is_finite() {
                return Err(CoxError::invalid(format!(
                    "non-finite value at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            if v != 0.0 {
                cols[j].push((rank[i] as u32, v));
            }
        }
        let nnz = cols.iter().map(Vec::len).sum();
        let mut col_ptr = Vec::with_capacity(p + 1);
        let mut positions = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        let mut event_sum = Vec::with_capacity(p);
        col_ptr.push(0);
        for (j, mut col) in cols.into_iter().enumerate() {
            col.sort_unstable_by_key(|e| e.0);
            if let Some(w) = col.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(CoxError::invalid(format!(
                    "duplicate entry in column {} at position {}",
                    j + 1,
                    w[0].0
                )));
            }
            let mut s = 0.0;
            for (pos, v) in col {
                if is_event[pos as usize] {
                    s += v;
                }
                positions.push(pos);
                values.push(v);
            }
            event_sum.push(s);
            col_ptr.push(positions.len());
        }
        Ok(Self {
            storage: Arc::new(CscStorage {
                col_ptr,
                positions,
                values,
                event_sum,
            }),
            selection: None,
            center: vec![0.0; p],
            scale: vec![1.0; p],
        })
    }

    pub fn ncols(&self) -> usize {
        self.center.len()
    }

    fn stored_index(&self, j: usize) -> usize {
        match &self.selection {
            Some(sel) => sel[j],
            None => j,
        }
    }

    pub fn column(&self, j: usize) -> Column<'_> {
        let s = self.stored_index(j);
        let st = &*self.storage;
        let range = st.col_ptr[s]..st.col_ptr[s + 1];
        Column {
            positions: &st.positions[range.clone()],
            values: &st.values[range],
            center: self.center[j],
            scale: self.scale[j],
            event_sum: st.event_sum[s],
        }
    }

    pub(super) fn select(&self, columns: &[usize]) -> Result<Self> {
        if let Some(&bad) = columns.iter().find(|&&j| j >= self.ncols()) {
            return Err(CoxError::invalid(format!(
                "column {} out of range (p = {})",
                bad + 1,
                self.ncols()
            )));
        }
        let sel: Arc<[usize]> = columns.iter().map(|&j| self.stored_index(j)).collect();
        Ok(Self {
            storage: Arc::clone(&self.storage),
            selection: Some(sel),
            center: columns.iter().map(|&j| self.center[j]).collect(),
            scale: columns.iter().map(|&j| self.scale[j]).collect(),
        })
    }

    pub(super) fn with_metadata(&self, center: Vec<f64>, scale: Vec<f64>) -> Self {
        Self {
            storage: Arc::clone(&self.storage),
            selection: self.selection.clone(),
            center,
            scale,
        }
    }

    pub(super) fn first_violation(&self, n: usize) -> Option<String> {
        for j in 0..self.ncols() {
            let col = self.column(j);
            if col.positions.windows(2).any(|w| w[0] >= w[1]) {
                return Some(format!("column {} entries not strictly ascending", j + 1));
            }
            if col.positions.last().is_some_and(|&p| p as usize >= n) {
                return Some(format!("column {} has an out-of-range row", j + 1));
            }
            if col.values.iter().any(|v| !v.is_finite() || *v == 0.0) {
                return Some(format!("column {} stores a zero or non-finite value", j + 1));
            }
            if !(col.scale.is_finite() && col.scale > 0.0 && col.center.is_finite()) {
                return Some(format!("column {} has invalid scaling metadata", j + 1));
            }
        }
        None
    }
}
