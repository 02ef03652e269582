//! Grid specifications: `a,b,c` or `lo:hi:logN` / `lo:hi:linN`.

use coxbar::sim::log_grid;

pub fn parse(spec: &str) -> Result<Vec<f64>, String> {
    let bad = || format!("malformed grid `{spec}`; use a,b,c or lo:hi:logN");
    let grid = if let [lo, hi, kind] = spec.split(':').collect::<Vec<_>>()[..] {
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let kind = kind.trim();
        let (log, count) = if let Some(c) = kind.strip_prefix("log") {
            (true, c)
        } else if let Some(c) = kind.strip_prefix("lin") {
            (false, c)
        } else {
            return Err(bad());
        };
        let count: usize = count.parse().map_err(|_| bad())?;
        if count == 0 || !(lo.is_finite() && hi.is_finite() && lo < hi) || (log && lo <= 0.0) {
            return Err(bad());
        }
        if log {
            log_grid(lo, hi, count)
        } else if count == 1 {
            vec![lo]
        } else {
            (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect()
        }
    } else {
        spec.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}
