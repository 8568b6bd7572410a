//! The discrete shift bound `E^ε_l(k) - E^0_l(k) >= 0` on nested trial spaces.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use super::source::{map_indexed, BandSource, FemBands};
use super::diagram::validate_grid;
use super::study::validate_epsilons;
use crate::analytic::WaveguideGeometry;
use crate::fem::{CellMesh, InterfaceState, MeshConfig, SolverConfig};
use crate::math::ln;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftSample {
    pub epsilon: f64,
    pub k: f64,
    pub band: usize,
    /// `E^ε_l(k) - E^0_l(k)`.
    pub shift: f64,
    /// `shift * |ln ε|`.
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftBoundReport {
    pub samples: Vec<ShiftSample>,
    pub min_shift: f64,
    /// `(ε, max over k and l of shift |ln ε|)`, in the order of the window list.
    pub max_scaled: Vec<(f64, f64)>,
    /// Every shift is at least `-1e-10`.
    pub nonnegative: bool,
    /// The largest scaled shift over the two smallest windows is at most 1.5
    /// times that over the two largest.
    pub bounded: bool,
    /// Shifts do not grow as the window shrinks, at every `(k, l)`.
    pub monotone: bool,
    pub dofs: usize,
}

impl ShiftBoundReport {
    pub fn passed(&self) -> bool {
        self.nonnegative && self.bounded && self.monotone
    }
}

pub const SHIFT_FLOOR: f64 = -1e-10;

/// Compare every window of `epsilons` against the closed interface on one
/// node layout graded for all of them, so the trial spaces are nested.
pub fn verify_shift_bound(
    geom: &WaveguideGeometry,
    epsilons: &[f64],
    k_grid: &[f64],
    n_bands: usize,
    mesh: &MeshConfig,
    solver: &SolverConfig,
) -> Result<ShiftBoundReport> {
    verify_shift_bound_with(geom, epsilons, k_grid, n_bands, mesh, &|m: &CellMesh| -> Result<Box<dyn BandSource>> {
        Ok(Box::new(FemBands::new(m, n_bands, *solver)))
    })
}

/// [`verify_shift_bound`] with the band source for each interface state
/// supplied by `source_for`. The meshes handed to it share one node layout;
/// the first has the interface closed, the others follow `epsilons`.
pub fn verify_shift_bound_with(
    geom: &WaveguideGeometry,
    epsilons: &[f64],
    k_grid: &[f64],
    n_bands: usize,
    mesh: &MeshConfig,
    source_for: &dyn Fn(&CellMesh) -> Result<Box<dyn BandSource>>,
) -> Result<ShiftBoundReport> {
    validate_epsilons(geom, epsilons)?;
    validate_grid(k_grid)?;
    let layout = CellMesh::build_layout(geom, epsilons, mesh)?;
    let mut states = Vec::with_capacity(epsilons.len() + 1);
    states.push(InterfaceState::Closed);
    states.extend(epsilons.iter().map(|&e| InterfaceState::Window(e)));
    let mut sources = Vec::with_capacity(states.len());
    let mut dofs = 0;
    for (i, &s) in states.iter().enumerate() {
        let m = layout.clone().with_interface(s)?;
        if i == 0 {
            dofs = m.dof_count();
        }
        sources.push(source_for(&m)?);
    }

    let nk = k_grid.len();
    let columns = map_indexed(sources.len() * nk, |i| sources[i / nk].column(k_grid[i % nk]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let energy = |s: usize, j: usize, l: usize| -> Result<f64> {
        columns[s * nk + j].energies.get(l).copied().ok_or_else(|| {
            Error::InvalidStudy(format!("band {l} missing at k = {}", k_grid[j]))
        })
    };

    let mut samples = Vec::new();
    for (i, &eps) in epsilons.iter().enumerate() {
        let scale = ln(eps).abs();
        for (j, &k) in k_grid.iter().enumerate() {
            for l in 0..n_bands {
                let shift = energy(i + 1, j, l)? - energy(0, j, l)?;
                samples.push(ShiftSample { epsilon: eps, k, band: l, shift, scaled: shift * scale });
            }
        }
    }
    Ok(summarize(epsilons, samples, nk * n_bands, dofs))
}

fn summarize(epsilons: &[f64], samples: Vec<ShiftSample>, per_eps: usize, dofs: usize) -> ShiftBoundReport {
    let min_shift = samples.iter().map(|s| s.shift).fold(f64::INFINITY, f64::min);
    let max_scaled: Vec<(f64, f64)> = epsilons
        .iter()
        .map(|&e| {
            let m = samples.iter().filter(|s| s.epsilon == e).map(|s| s.scaled).fold(f64::NEG_INFINITY, f64::max);
            (e, m)
        })
        .collect();
    let bounded = if max_scaled.len() >= 2 {
        let large = max_scaled[..2].iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let small = max_scaled[max_scaled.len() - 2..].iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        small <= 1.5 * large
    } else {
        true
    };
    let monotone = (1..epsilons.len()).all(|i| {
        (0..per_eps).all(|t| samples[i * per_eps + t].shift <= samples[(i - 1) * per_eps + t].shift + 1e-10)
    });
    ShiftBoundReport {
        nonnegative: min_shift >= SHIFT_FLOOR,
        samples,
        min_shift,
        max_scaled,
        bounded,
        monotone,
        dofs,
    }
}
