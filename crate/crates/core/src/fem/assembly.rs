//! Global matrices of the Bloch form on a [`CellMesh`].

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::element::local_matrices;
use super::mesh::CellMesh;

/// The `k`-independent pieces: stiffness `K`, mass `B` and the real
/// antisymmetric coupling `S`, on one shared CSR pattern.
#[derive(Debug, Clone)]
pub struct CellOperators {
    dofs: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    stiffness: Vec<f64>,
    mass: Vec<f64>,
    coupling: Vec<f64>,
    half_period: f64,
    spectrum_floor: f64,
}

impl CellOperators {
    pub fn assemble(mesh: &CellMesh) -> Self {
        let n = mesh.dof_count();
        let npe = mesh.config().order.nodes_per_element();
        let nodes = mesh.nodes();

        let element_dofs = |e: &super::mesh::Element| -> [Option<usize>; 6] {
            core::array::from_fn(|i| if i < npe { mesh.dof(e.nodes[i]) } else { None })
        };

        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in mesh.elements() {
            let d = element_dofs(e);
            for r in d.iter().flatten() {
                rows[*r].extend(d.iter().flatten());
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            cols.extend_from_slice(row);
            row_ptr.push(cols.len());
        }
        drop(rows);

        let nnz = cols.len();
        let mut stiffness = vec![0.0; nnz];
        let mut mass = vec![0.0; nnz];
        let mut coupling = vec![0.0; nnz];
        for e in mesh.elements() {
            let d = element_dofs(e);
            let v = [nodes[e.nodes[0]], nodes[e.nodes[1]], nodes[e.nodes[2]]];
            let local = local_matrices(mesh.config().order, v);
            for r in 0..npe {
                let Some(gr) = d[r] else { continue };
                let row = &cols[row_ptr[gr]..row_ptr[gr + 1]];
                for c in 0..npe {
                    let Some(gc) = d[c] else { continue };
                    let at = row_ptr[gr] + row.binary_search(&gc).expect("pattern holds the entry");
                    stiffness[at] += local.stiffness[r][c];
                    mass[at] += local.mass[r][c];
                    coupling[at] += local.coupling[r][c];
                }
            }
        }

        let geom = mesh.geometry();
        Self {
            dofs: n,
            row_ptr,
            cols,
            stiffness,
            mass,
            coupling,
            half_period: geom.half_period(),
            spectrum_floor: geom.spectrum_bottom().min({
                let q = crate::math::PI / (2.0 * geom.d_minus());
                q * q
            }),
        }
    }

    pub fn dof_count(&self) -> usize {
        self.dofs
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    /// A lower bound for the spectrum of the continuous problem for every
    /// window and every `k`; conforming discrete eigenvalues lie above it.
    pub fn spectrum_floor(&self) -> f64 {
        self.spectrum_floor
    }

    pub(crate) fn row(&self, i: usize) -> core::ops::Range<usize> {
        self.row_ptr[i]..self.row_ptr[i + 1]
    }

    pub(crate) fn col(&self, at: usize) -> usize {
        self.cols[at]
    }

    pub(crate) fn entry(&self, at: usize) -> (f64, f64, f64) {
        (self.stiffness[at], self.mass[at], self.coupling[at])
    }

    /// Sparse triplets `(row, col, K, B, S)` of the stored pattern.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64, f64, f64)> + '_ {
        (0..self.dofs).flat_map(move |i| {
            self.row(i)
                .map(move |at| (i, self.cols[at], self.stiffness[at], self.mass[at], self.coupling[at]))
        })
    }
}

/// `A(k) = K + κ C + κ² B` with `κ = k / (2h)` and `C = i S`, together with
/// the mass matrix `B`.
#[derive(Debug, Clone)]
pub struct DiscreteBlochForm {
    operators: Arc<CellOperators>,
    k: f64,
}

impl DiscreteBlochForm {
    pub fn new(operators: Arc<CellOperators>, k: f64) -> Self {
        Self { operators, k }
    }

    pub fn operators(&self) -> &Arc<CellOperators> {
        &self.operators
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn kappa(&self) -> f64 {
        self.k / (2.0 * self.operators.half_period)
    }

    pub fn dof_count(&self) -> usize {
        self.operators.dofs
    }

    /// Entry of `A(k) - shift B` at a stored position.
    #[inline]
    pub(crate) fn shifted_entry(&self, at: usize, shift: f64) -> Complex64 {
        let kappa = self.kappa();
        let (k, m, s) = self.operators.entry(at);
        Complex64::new(k + (kappa * kappa - shift) * m, kappa * s)
    }

    /// `y = A(k) x`.
    pub fn apply_a(&self, x: &[Complex64], y: &mut [Complex64]) {
        let ops = &*self.operators;
        for (i, yi) in y.iter_mut().enumerate().take(ops.dofs) {
            let mut acc = Complex64::new(0.0, 0.0);
            for at in ops.row(i) {
                acc += self.shifted_entry(at, 0.0) * x[ops.cols[at]];
            }
            *yi = acc;
        }
    }

    /// `y = B x`.
    pub fn apply_b(&self, x: &[Complex64], y: &mut [Complex64]) {
        let ops = &*self.operators;
        for (i, yi) in y.iter_mut().enumerate().take(ops.dofs) {
            let mut acc = Complex64::new(0.0, 0.0);
            for at in ops.row(i) {
                acc += ops.mass[at] * x[ops.cols[at]];
            }
            *yi = acc;
        }
    }

    /// Dense row-major copies of `A(k)` and `B`; intended for small problems.
    pub fn to_dense(&self) -> (Vec<Complex64>, Vec<f64>) {
        let n = self.dof_count();
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        let mut b = vec![0.0; n * n];
        for i in 0..n {
            for at in self.operators.row(i) {
                let j = self.operators.cols[at];
                a[i * n + j] = self.shifted_entry(at, 0.0);
                b[i * n + j] = self.operators.mass[at];
            }
        }
        (a, b)
    }
}

/// Assemble the Bloch form of `mesh` at quasimomentum `k`.
pub fn assemble(mesh: &CellMesh, k: f64) -> DiscreteBlochForm {
    DiscreteBlochForm::new(Arc::new(CellOperators::assemble(mesh)), k)
}
