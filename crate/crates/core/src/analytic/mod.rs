//! Closed-form side of the problem.
//!
//! With the windows closed the cell operator splits into two Dirichlet/Neumann
//! strips whose band functions are explicit parabolas in `k`. When a band of
//! the upper strip and a band of the lower strip cross at an interior
//! quasimomentum with slopes of opposite sign, cutting the windows opens a gap
//! of width `~ 1/|ln ε|` whose edges sit at split quasimomenta `±k_l`, `±k_r`
//! away from `0` and `π`. This module enumerates those crossings and evaluates
//! the leading-order formulas for everything that is measured numerically by
//! [`crate::explorer`].

mod crossing;
mod dispersion;
mod forecast;
mod geometry;
mod identities;
mod inner;

pub use crossing::{find_crossings, BandCrossing, DEFAULT_ENERGY_CAP};
pub use dispersion::{
    band_range, count_bands_containing, evaluate_mode, longitudinal_energy, transverse_energy,
    unperturbed_eigenvalue, Branch, ModeIndex,
};
pub use forecast::{corollary_holds, CorrectionExtrema, GapEdge, GapForecast};
pub use geometry::WaveguideGeometry;
pub use identities::{identity_suite, IdentityCheck};
pub use inner::{inner_profile, SlitSide};
