use alloc::boxed::Box;
use alloc::string::String;

use crate::analytic::Branch;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(&'static str),

    #[error("point with x2 = {x2} lies outside the {branch:?} strip")]
    PointOutsideStrip { branch: Branch, x2: f64 },

    #[error("gap forecasts assume d_plus = pi, got d_plus = {d_plus}")]
    UpperWidthNotCanonical { d_plus: f64 },

    #[error("beta = {beta} is outside (-1, 1); the band slopes at the crossing do not have opposite signs")]
    NotACrossing { beta: f64 },

    #[error("window half-width {epsilon} must lie in (0, 1) for the 1/ln(eps) expansion")]
    LogScaleOutOfRange { epsilon: f64 },

    #[error("xi = ({xi1}, 0) lies on the slit; pass a side to take a one-sided limit")]
    OnSlit { xi1: f64 },

    #[error("energy cap {cap} reaches the first excited transverse level {threshold}")]
    EnergyCapTooHigh { cap: f64, threshold: f64 },

    #[error("invalid mesh request: {0}")]
    InvalidMesh(String),

    #[error("window edge x1 = {epsilon} is not a vertex of the mesh layout")]
    WindowNotOnGrid { epsilon: f64 },

    #[error("invalid eigensolver request: {0}")]
    InvalidSolveRequest(String),

    #[error("shifted operator is not positive definite (pivot {pivot} at row {row}); lower the shift")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    NotConverged { iterations: usize, worst_residual: f64 },

    #[error("band solve failed at k = {k}: {source}")]
    BandSolve {
        k: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid quasimomentum grid: {0}")]
    InvalidGrid(String),

    #[error("samples on [{lo}, {hi}] do not bracket an extremum")]
    NotBracketed { lo: f64, hi: f64 },

    #[error("inverse-log fit needs at least 3 points with eps in (0, 1), got {points}")]
    InsufficientFitData { points: usize },

    #[error("inverse-log fit is degenerate: all points share the same |ln eps|")]
    DegenerateFit,

    #[error("invalid study request: {0}")]
    InvalidStudy(String),
}
