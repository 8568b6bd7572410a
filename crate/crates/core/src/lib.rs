//! Spectral bands of two Dirichlet strips of widths `d_plus` and `d_minus`
//! sharing a Neumann interface that is pierced by a `2h`-periodic array of
//! windows of half-width `ε`.
//!
//! The crate has three layers:
//!
//! * [`analytic`] evaluates the decoupled dispersion laws in closed form,
//!   enumerates the band crossings that open a gap once the windows are cut,
//!   and carries the leading-order `1/|ln ε|` forecasts for the gap edges and
//!   the quasimomenta at which they are attained.
//! * [`fem`] discretizes the Bloch fiber operator on one period cell with
//!   quadratic (or linear) triangles on a tensor grid graded towards the window
//!   tips and computes its lowest eigenvalues.
//! * [`explorer`] sweeps the Brillouin zone, detects gaps, refines the band
//!   extrema by golden-section search and fits `c0 + c1/|ln ε|` models across a
//!   series of window sizes.
//!
//! Everything here is IO free and builds without `std` (an allocator is
//! required). The `parallel` feature spreads independent quasimomentum
//! columns over a rayon pool.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analytic;
pub mod error;
pub mod explorer;
pub mod fem;
mod math;

pub use error::{Error, Result};
