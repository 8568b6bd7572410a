//! Finite-element Bloch eigensolver on the period cell.

mod assembly;
mod convergence;
mod dense;
mod eigen;
mod element;
mod envelope;
mod grading;
mod mesh;
mod ordering;
mod reference;

pub use assembly::{assemble, CellOperators, DiscreteBlochForm};
pub use convergence::{convergence_study, ConvergenceLevel, ConvergenceTable};
pub use eigen::{solve_lowest, EigenSolveResult, SolveMethod, SolverConfig};
pub use mesh::{build_mesh, CellMesh, Element, ElementOrder, InterfaceNode, InterfaceState, MeshConfig};
pub use reference::{full_strip_spectrum, reference_spectrum};
