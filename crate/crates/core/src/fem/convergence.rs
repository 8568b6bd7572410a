//! Mesh-refinement studies.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::assembly::{CellOperators, DiscreteBlochForm};
use super::eigen::{solve_lowest, SolverConfig};
use super::mesh::{CellMesh, InterfaceState, MeshConfig};
use super::reference::{full_strip_spectrum, reference_spectrum};
use crate::analytic::WaveguideGeometry;
use crate::math::ln;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceLevel {
    pub level: u32,
    pub dofs: usize,
    pub eigenvalues: Vec<f64>,
    /// Relative errors against the closed-form spectrum, when one exists.
    pub errors: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub levels: Vec<ConvergenceLevel>,
    /// Observed order per eigenvalue from the last three levels (or the last
    /// two errors when a reference exists), in powers of the mesh size.
    pub orders: Vec<f64>,
}

/// Solve on `levels` successive uniform bisections of `base`. The interface
/// state selects the reference: none for a window, the decoupled spectrum for
/// a closed interface, the full Dirichlet strip for an open one.
pub fn convergence_study(
    geom: &WaveguideGeometry,
    state: InterfaceState,
    k: f64,
    count: usize,
    levels: u32,
    base: &MeshConfig,
    solver: &SolverConfig,
) -> Result<ConvergenceTable> {
    if levels < 3 {
        return Err(Error::InvalidSolveRequest("a convergence study needs at least 3 levels".into()));
    }
    let windows: Vec<f64> = match state {
        InterfaceState::Window(e) if e > 0.0 => alloc::vec![e],
        _ => Vec::new(),
    };
    let reference = match state {
        InterfaceState::Closed => Some(reference_spectrum(geom, k, count)),
        InterfaceState::Open => Some(full_strip_spectrum(geom, k, count)),
        InterfaceState::Window(e) if e == 0.0 => Some(reference_spectrum(geom, k, count)),
        InterfaceState::Window(_) => None,
    };

    let mut rows = Vec::with_capacity(levels as usize);
    for level in 0..levels {
        let mesh = CellMesh::build_layout(geom, &windows, &base.refined(level))?.with_interface(state)?;
        let form = DiscreteBlochForm::new(Arc::new(CellOperators::assemble(&mesh)), k);
        let result = solve_lowest(&form, count, solver)?;
        let errors = reference.as_ref().map(|r| {
            result.eigenvalues.iter().zip(r).map(|(a, b)| (a - b).abs() / b.abs()).collect()
        });
        rows.push(ConvergenceLevel { level, dofs: form.dof_count(), eigenvalues: result.eigenvalues, errors });
    }

    let n = rows.len();
    let orders = (0..count)
        .map(|j| match &reference {
            Some(_) => {
                let e = |r: &ConvergenceLevel| r.errors.as_ref().expect("reference present")[j];
                ln(e(&rows[n - 2]) / e(&rows[n - 1])) / ln(2.0)
            }
            None => {
                let v = |r: &ConvergenceLevel| r.eigenvalues[j];
                let d1 = (v(&rows[n - 2]) - v(&rows[n - 3])).abs();
                let d2 = (v(&rows[n - 1]) - v(&rows[n - 2])).abs();
                ln(d1 / d2) / ln(2.0)
            }
        })
        .collect();
    Ok(ConvergenceTable { levels: rows, orders })
}
