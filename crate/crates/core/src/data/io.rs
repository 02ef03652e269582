//! Plain-text dataset formats.
//!
//! * survival CSV: header `id,time,status`, one row per subject.
//! * dense design CSV: header `id,x1,...,xp`, rows in the survival file's order.
//! * sparse-coord design: first line `n p nnz`, then `row col value` triples
//!   (1-based, whitespace separated, any order).
//!
//! Writers emit the canonical form: shortest round-trip decimal for every
//! number, sparse triples sorted by column then row. Standardization metadata
//! is not part of either format; the raw values are written.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::SurvivalDataset;
use crate::error::{CoxError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignFormat {
    DenseCsv,
    SparseCoord,
}

impl FromStr for DesignFormat {
    type Err = CoxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense-csv" | "dense" | "csv" => Ok(Self::DenseCsv),
            "sparse-coord" | "sparse" | "coord" => Ok(Self::SparseCoord),
            other => Err(CoxError::invalid(format!("unknown design format `{other}`"))),
        }
    }
}

impl DesignFormat {
    /// `.csv` means dense CSV; anything else is read as sparse-coord.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Self::DenseCsv,
            _ => Self::SparseCoord,
        }
    }
}

fn parse_f64(path: &Path, line: usize, field: &str, what: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| CoxError::parse(path, line, format!("malformed {what} `{field}`")))
}

fn read_survival(path: &Path) -> Result<(Vec<String>, Vec<f64>, Vec<u8>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, header)) if header.split(',').map(str::trim).eq(["id", "time", "status"]) => {}
        _ => return Err(CoxError::parse(path, 1, "expected header `id,time,status`")),
    }
    let (mut ids, mut time, mut status) = (Vec::new(), Vec::new(), Vec::new());
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CoxError::parse(
                path,
                ln,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let t = parse_f64(path, ln, fields[1], "time")?;
        if !(t.is_finite() && t > 0.0) {
            return Err(CoxError::parse(path, ln, format!("nonpositive time {t}")));
        }
        let s = match fields[2].trim() {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(CoxError::parse(
                    path,
                    ln,
                    format!("status `{other}` outside {{0,1}}"),
                ))
            }
        };
        ids.push(fields[0].trim().to_string());
        time.push(t);
        status.push(s);
    }
    Ok((ids, time, status))
}

type Triplets = Vec<(usize, usize, f64)>;

fn read_dense(path: &Path, ids: &[String]) -> Result<(usize, Triplets)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let p = match lines.next() {
        Some((_, header)) if header.split(',').next().map(str::trim) == Some("id") => {
            header.split(',').count() - 1
        }
        _ => return Err(CoxError::parse(path, 1, "expected header `id,x1,...,xp`")),
    };
    let mut triplets = Vec::new();
    let mut row = 0;
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != p + 1 {
            return Err(CoxError::parse(
                path,
                ln,
                format!("expected {} fields, found {}", p + 1, fields.len()),
            ));
        }
        match ids.get(row) {
            Some(id) if id == fields[0].trim() => {}
            Some(id) => {
                return Err(CoxError::parse(
                    path,
                    ln,
                    format!("id `{}` does not match survival id `{id}`", fields[0].trim()),
                ))
            }
            None => {
                return Err(CoxError::parse(
                    path,
                    ln,
                    format!("more design rows than the {} subjects", ids.len()),
                ))
            }
        }
        for (j, f) in fields[1..].iter().enumerate() {
            let v = parse_f64(path, ln, f, "value")?;
            if !v.is_finite() {
                return Err(CoxError::parse(
                    path,
                    ln,
                    format!("non-finite value in column {}", j + 1),
                ));
            }
            if v != 0.0 {
                triplets.push((row, j, v));
            }
        }
        row += 1;
    }
    if row != ids.len() {
        return Err(CoxError::parse(
            path,
            text.lines().count(),
            format!("{row} design rows for {} subjects", ids.len()),
        ));
    }
    Ok((p, triplets))
}

fn read_sparse(path: &Path, n_expected: usize) -> Result<(usize, Triplets)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines
        .next()
        .ok_or_else(|| CoxError::parse(path, 1, "missing `n p nnz` header"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CoxError::parse(path, hl, "malformed `n p nnz` header"))?;
    let [n, p, nnz] = dims[..] else {
        return Err(CoxError::parse(path, hl, "expected header `n p nnz`"));
    };
    if n != n_expected {
        return Err(CoxError::parse(
            path,
            hl,
            format!("header declares n = {n} but the survival file has {n_expected} subjects"),
        ));
    }
    let mut triplets = Vec::with_capacity(nnz);
    let mut seen = std::collections::HashSet::with_capacity(nnz);
    let mut last_line = hl;
    for (ln, line) in lines {
        last_line = ln;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(CoxError::parse(
                path,
                ln,
                format!("expected `row col value`, found {} fields", fields.len()),
            ));
        }
        let index = |f: &str, what: &str, max: usize| -> Result<usize> {
            match f.parse::<usize>() {
                Ok(i) if (1..=max).contains(&i) => Ok(i - 1),
                Ok(i) => Err(CoxError::parse(
                    path,
                    ln,
                    format!("{what} index {i} out of range 1..={max}"),
                )),
                Err(_) => Err(CoxError::parse(path, ln, format!("malformed {what} index `{f}`"))),
            }
        };
        let i = index(fields[0], "row", n)?;
        let j = index(fields[1], "column", p)?;
        let v = parse_f64(path, ln, fields[2], "value")?;
        if !v.is_finite() {
            return Err(CoxError::parse(path, ln, "non-finite value"));
        }
        if !seen.insert((i, j)) {
            return Err(CoxError::parse(
                path,
                ln,
                format!("duplicate entry ({}, {})", i + 1, j + 1),
            ));
        }
        triplets.push((i, j, v));
    }
    if triplets.len() != nnz {
        return Err(CoxError::parse(
            path,
            last_line,
            format!(
                "header declares nnz = {nnz} but {} entries were read",
                triplets.len()
            ),
        ));
    }
    Ok((p, triplets))
}

pub fn load_dataset(survival: &Path, design: &Path, format: DesignFormat) -> Result<SurvivalDataset> {
    let (ids, time, status) = read_survival(survival)?;
    let (p, triplets) = match format {
        DesignFormat::DenseCsv => read_dense(design, &ids)?,
        DesignFormat::SparseCoord => read_sparse(design, ids.len())?,
    };
    SurvivalDataset::from_triplets(Some(ids), time, status, p, triplets)
}

pub(crate) fn survival_text(ds: &SurvivalDataset) -> String {
    let mut out = String::with_capacity(16 * ds.n());
    out.push_str("id,time,status\n");
    for ((id, t), s) in ds.ids().iter().zip(ds.time()).zip(ds.status()) {
        let _ = writeln!(out, "{id},{t},{s}");
    }
    out
}

pub(crate) fn design_text(ds: &SurvivalDataset, format: DesignFormat) -> String {
    let mut out = String::new();
    match format {
        DesignFormat::DenseCsv => {
            out.push_str("id");
            for j in 1..=ds.p() {
                let _ = write!(out, ",x{j}");
            }
            out.push('\n');
            let cols: Vec<Vec<f64>> = (0..ds.p()).map(|j| ds.raw_column_dense(j)).collect();
            for (i, id) in ds.ids().iter().enumerate() {
                out.push_str(id);
                for col in &cols {
                    let _ = write!(out, ",{}", col[i]);
                }
                out.push('\n');
            }
        }
        DesignFormat::SparseCoord => {
            let _ = writeln!(out, "{} {} {}", ds.n(), ds.p(), ds.nnz());
            let order = ds.order();
            let mut entries = Vec::new();
            for j in 0..ds.p() {
                let col = ds.column(j);
                entries.clear();
                entries.extend(
                    col.positions
                        .iter()
                        .zip(col.values)
                        .map(|(&pos, &v)| (order[pos as usize], v)),
                );
                entries.sort_unstable_by_key(|e| e.0);
                for &(i, v) in &entries {
                    let _ = writeln!(out, "{} {} {}", i + 1, j + 1, v);
                }
            }
        }
    }
    out
}

pub fn save_dataset(
    ds: &SurvivalDataset,
    survival: &Path,
    design: &Path,
    format: DesignFormat,
) -> Result<()> {
    fs::write(survival, survival_text(ds))?;
    fs::write(design, design_text(ds, format))?;
    Ok(())
}
