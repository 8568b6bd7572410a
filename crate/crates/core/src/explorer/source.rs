//! Where band energies come from.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::fem::{solve_lowest, CellMesh, CellOperators, DiscreteBlochForm, SolveMethod, SolverConfig};
use crate::{Error, Result};

/// Per-column solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnMeta {
    pub iterations: usize,
    pub solves: usize,
    pub worst_residual: f64,
    pub method: Option<SolveMethod>,
}

impl ColumnMeta {
    pub const EXACT: Self = Self { iterations: 0, solves: 0, worst_residual: 0.0, method: None };
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandColumn {
    /// Nondecreasing energies of the lowest bands at one quasimomentum.
    pub energies: Vec<f64>,
    pub meta: ColumnMeta,
}

/// Lowest band energies as a function of the quasimomentum.
pub trait BandSource: Sync {
    fn band_count(&self) -> usize;

    fn column(&self, k: f64) -> Result<BandColumn>;

    /// Size of the underlying discretization, if any.
    fn dof_count(&self) -> Option<usize> {
        None
    }

    /// Energy of band `band` (0-based) at `k`.
    fn band_energy(&self, band: usize, k: f64) -> Result<f64> {
        let col = self.column(k)?;
        col.energies
            .get(band)
            .copied()
            .ok_or_else(|| Error::InvalidStudy(alloc::format!("band {band} not computed")))
    }
}

/// Bands from a closure returning the sorted energies at `k`; handy for
/// closed-form spectra.
pub struct FnBands<F> {
    count: usize,
    f: F,
}

impl<F: Fn(f64) -> Vec<f64> + Sync> FnBands<F> {
    pub fn new(count: usize, f: F) -> Self {
        Self { count, f }
    }
}

impl<F: Fn(f64) -> Vec<f64> + Sync> BandSource for FnBands<F> {
    fn band_count(&self) -> usize {
        self.count
    }

    fn column(&self, k: f64) -> Result<BandColumn> {
        let mut energies = (self.f)(k);
        energies.sort_by(f64::total_cmp);
        energies.truncate(self.count);
        Ok(BandColumn { energies, meta: ColumnMeta::EXACT })
    }
}

/// Bands from finite-element solves on one fixed mesh.
#[derive(Debug, Clone)]
pub struct FemBands {
    operators: Arc<CellOperators>,
    count: usize,
    solver: SolverConfig,
}

impl FemBands {
    pub fn new(mesh: &CellMesh, count: usize, solver: SolverConfig) -> Self {
        Self { operators: Arc::new(CellOperators::assemble(mesh)), count, solver }
    }

    pub fn from_operators(operators: Arc<CellOperators>, count: usize, solver: SolverConfig) -> Self {
        Self { operators, count, solver }
    }

    pub fn operators(&self) -> &Arc<CellOperators> {
        &self.operators
    }
}

impl BandSource for FemBands {
    fn band_count(&self) -> usize {
        self.count
    }

    fn dof_count(&self) -> Option<usize> {
        Some(self.operators.dof_count())
    }

    fn column(&self, k: f64) -> Result<BandColumn> {
        let form = DiscreteBlochForm::new(self.operators.clone(), k);
        let r = solve_lowest(&form, self.count, &self.solver)
            .map_err(|e| Error::BandSolve { k, source: Box::new(e) })?;
        Ok(BandColumn {
            meta: ColumnMeta {
                iterations: r.iterations,
                solves: r.solves,
                worst_residual: r.worst_residual(),
                method: Some(r.method),
            },
            energies: r.eigenvalues,
        })
    }
}

/// Evaluate `f` on every index, in parallel with the `parallel` feature.
/// Results come back in index order either way.
pub(crate) fn map_indexed<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

impl<S: BandSource + ?Sized> BandSource for Box<S> {
    fn band_count(&self) -> usize {
        (**self).band_count()
    }

    fn column(&self, k: f64) -> Result<BandColumn> {
        (**self).column(k)
    }

    fn dof_count(&self) -> Option<usize> {
        (**self).dof_count()
    }
}
