//! Fixtures shared by the criterion benchmarks.

use coxbar::{simulate, DesignKind, SimScenario, StandardizeMode, SurvivalDataset};

/// Sparse binary design with `signals` unit effects and heavy censoring,
/// scaled to unit root mean square.
pub fn sparse_fixture(n: usize, p: usize, sparsity: f64, signals: usize) -> SurvivalDataset {
    let mut beta0 = vec![0.0; p];
    for (j, b) in beta0.iter_mut().take(signals).enumerate() {
        *b = if j % 2 == 0 { 1.0 } else { -1.0 };
    }
    let scenario = SimScenario {
        n,
        beta0,
        design: DesignKind::SparseBinary { sparsity },
        target_censoring: 0.9,
        seed: 17,
    };
    simulate(&scenario)
        .expect("fixture scenario is valid")
        .standardize(StandardizeMode::ScaleOnly)
        .expect("scale-only standardization cannot fail")
}

/// Dense AR(1) Gaussian design with the moderate-effects truth.
pub fn dense_fixture(n: usize, p: usize) -> SurvivalDataset {
    simulate(&SimScenario::moderate(n, p, 17)).expect("fixture scenario is valid")
}
