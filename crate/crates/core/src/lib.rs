//! Sparse Cox proportional-hazards regression with the broken adaptive ridge
//! (BAR) penalty, fitted by cyclic coordinate descent on sparse designs.
//!
//! ```
//! use coxbar::{fit_bar, BarConfig, SurvivalDataset};
//!
//! let ds = SurvivalDataset::from_columns(
//!     vec![5.0, 3.0, 4.0, 1.0, 2.0, 6.0],
//!     vec![1, 1, 0, 1, 1, 0],
//!     &[vec![0.0, 1.0, 0.0, 2.0, 1.0, 0.0], vec![0.0; 6]],
//! )
//! .unwrap();
//! let fit = fit_bar(&ds, &BarConfig::default()).unwrap();
//! assert_eq!(fit.beta[1], 0.0);
//! ```

pub mod bar;
pub mod data;
pub mod error;
pub mod likelihood;
pub mod screening;
pub mod sim;
pub mod solver;

pub use bar::{
    fit_bar, fit_bar_grid, fit_ridge, grouping_bound_check, information_criteria, path_over, BarConfig,
    Criterion, GridFit, GroupingReport, LambdaRule, PathAxis, PathPoint, PathResult,
};
pub use data::{
    load_dataset, save_dataset, Column, DesignFormat, EventGroup, SparseColumnMatrix, StandardizeMode,
    SurvivalDataset, ValidationReport,
};
pub use error::{CoxError, Result};
pub use likelihood::{CoordDerivatives, LinearPredictorState};
pub use screening::{sjs_coxbar, sjs_screen, ScreenOptions, ScreenResult};
pub use sim::{
    calibrate_u_max, run_benchmark, score, simulate, BenchOptions, BenchRow, DesignKind, Method,
    MethodConfig, SelectionMetrics, SimScenario,
};
pub use solver::{ccd_minimize, FitResult, InformationCriteria, PenaltySpec, SolverOptions};

/// Crate version, echoed in fit reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
