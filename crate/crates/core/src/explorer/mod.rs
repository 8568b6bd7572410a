//! Brillouin-zone sweeps, gap detection and window-size studies.

mod diagram;
mod fit;
mod refine;
mod shift;
mod source;
mod study;

pub use diagram::{detect_gaps, linspace, sweep, validate_grid, BandDiagram, GapRecord};
pub use fit::{fit_inverse_log, fit_inverse_log_quadratic, AsymptoticFit, QuadraticFit};
pub use refine::{fold_quasimomentum, refine_extremum, Extremum, ExtremumKind};
pub use shift::{verify_shift_bound, verify_shift_bound_with, ShiftBoundReport, ShiftSample, SHIFT_FLOOR};
pub use source::{BandColumn, BandSource, ColumnMeta, FemBands, FnBands};
pub use study::{
    epsilon_study, epsilon_study_with, study_gap, CorrectedFits, EpsilonStudy, ForecastPoint, GapOutcome, RowStatus, StudyConfig,
    StudyFits, StudyRow, DEFAULT_EPSILONS, NEARBY_RADIUS,
};
