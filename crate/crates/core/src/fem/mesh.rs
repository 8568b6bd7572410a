//! Structured triangulation of the period cell `(-h, h] x (-d_minus, d_plus)`.
//!
//! Each strip carries its own tensor grid of nodes. The interface row
//! `x2 = 0` therefore exists twice, once per strip; an interface node pair is
//! merged into one degree of freedom inside the window and kept apart on the
//! Neumann part. Columns `x1 = -h` and `x1 = h` are identified, and nodes on
//! `x2 = d_plus` or `x2 = -d_minus` are removed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::analytic::{Branch, WaveguideGeometry};
use crate::{Error, Result};

use super::grading::{bisect, graded_axis, SizeField, Tip};
use super::ordering::reverse_cuthill_mckee;

/// Polynomial degree of the Lagrange elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementOrder {
    Linear,
    Quadratic,
}

impl ElementOrder {
    pub fn nodes_per_element(self) -> usize {
        match self {
            ElementOrder::Linear => 3,
            ElementOrder::Quadratic => 6,
        }
    }
}

/// Resolution controls for [`CellMesh`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshConfig {
    /// Elements across the period `2h` away from the window.
    pub n1: usize,
    /// Elements across the upper strip away from the window; the lower strip
    /// uses the same element height.
    pub n2: usize,
    /// Ratio between neighbouring element sizes when approaching a window tip,
    /// in `(0, 1]`; `1` disables grading.
    pub grading: f64,
    /// Element size at a window tip as a fraction of `ε`.
    pub tip_fraction: f64,
    pub order: ElementOrder,
    /// Uniform bisections applied after grading.
    pub refinement: u32,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            n1: 24,
            n2: 8,
            grading: 0.5,
            tip_fraction: 0.25,
            order: ElementOrder::Quadratic,
            refinement: 0,
        }
    }
}

impl MeshConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n1 < 4 || self.n2 < 4 {
            return Err(Error::InvalidMesh(format!(
                "resolution ({}, {}) below the minimum of 4 elements per direction",
                self.n1, self.n2
            )));
        }
        if !(self.grading > 0.0 && self.grading <= 1.0) {
            return Err(Error::InvalidMesh(format!(
                "grading factor {} outside (0, 1]",
                self.grading
            )));
        }
        if !(self.tip_fraction > 0.0 && self.tip_fraction <= 1.0) {
            return Err(Error::InvalidMesh(format!(
                "tip fraction {} outside (0, 1]",
                self.tip_fraction
            )));
        }
        Ok(())
    }

    pub fn refined(&self, levels: u32) -> Self {
        Self {
            refinement: self.refinement + levels,
            ..*self
        }
    }
}

/// How the two strips are joined along `x2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterfaceState {
    /// Neumann everywhere: the strips are decoupled.
    Closed,
    /// Shared nodes on the closed window `|x1| <= ε`.
    Window(f64),
    /// Shared nodes on the whole interface: one strip of width `d_plus + d_minus`.
    Open,
}

/// One abscissa of the interface row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceNode {
    pub x1: f64,
    pub plus: usize,
    pub minus: usize,
    pub shared: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub branch: Branch,
    /// Vertices first, then edge midpoints `(01, 12, 20)` for quadratic elements.
    pub nodes: [usize; 6],
}

#[derive(Debug, Clone)]
pub struct CellMesh {
    geometry: WaveguideGeometry,
    config: MeshConfig,
    windows: Vec<f64>,
    state: InterfaceState,
    x1_vertices: Vec<f64>,
    x1_nodes: Vec<f64>,
    x2_plus: Vec<f64>,
    x2_minus: Vec<f64>,
    nodes: Vec<[f64; 2]>,
    elements: Vec<Element>,
    interface: Vec<InterfaceNode>,
    periodic: Vec<(usize, usize)>,
    dirichlet: Vec<bool>,
    dof_of_node: Vec<Option<usize>>,
    dof_count: usize,
    min_tip_edge: Option<f64>,
}

impl CellMesh {
    /// Mesh of the cell of `geom` with the window `|x1| <= geom.window_half_width()`
    /// (closed interface when the width is zero).
    pub fn build(geom: &WaveguideGeometry, config: &MeshConfig) -> Result<Self> {
        let eps = geom.window_half_width();
        let windows: Vec<f64> = if eps > 0.0 { vec![eps] } else { Vec::new() };
        let state = if eps > 0.0 {
            InterfaceState::Window(eps)
        } else {
            InterfaceState::Closed
        };
        Self::build_layout(geom, &windows, config)?.with_interface(state)
    }

    /// Node layout graded towards every `±ε` in `windows`, starting with a
    /// closed interface. Any of these windows can later be switched on with
    /// [`CellMesh::with_interface`] without touching the nodes, which gives a
    /// nested family of trial spaces on one mesh.
    pub fn build_layout(
        geom: &WaveguideGeometry,
        windows: &[f64],
        config: &MeshConfig,
    ) -> Result<Self> {
        config.validate()?;
        let h = geom.half_period();
        let mut windows: Vec<f64> = windows.to_vec();
        windows.sort_by(f64::total_cmp);
        windows.dedup();
        for &eps in &windows {
            if !(eps > 0.0 && eps < h) {
                return Err(Error::InvalidMesh(format!(
                    "window half-width {eps} outside (0, h = {h})"
                )));
            }
        }

        let base1 = 2.0 * h / config.n1 as f64;
        let base2 = geom.d_plus() / config.n2 as f64;
        let tip_size = |eps: f64| config.tip_fraction * eps;
        if config.grading == 1.0 {
            if let Some(&eps) = windows.first() {
                if tip_size(eps) < base1.max(base2) {
                    return Err(Error::InvalidMesh(format!(
                        "grading factor 1 cannot reach the tip size {} for eps = {eps}",
                        tip_size(eps)
                    )));
                }
            }
        }

        let mut tips1 = Vec::new();
        let mut breaks1 = Vec::new();
        for &eps in &windows {
            for pos in [-eps, eps] {
                tips1.push(Tip { position: pos, size: tip_size(eps).min(base1) });
                breaks1.push(pos);
            }
        }
        let field1 = SizeField::geometric(base1, config.grading, tips1);
        let mut x1 = graded_axis(-h, h, &breaks1, &field1)?;

        let tips2: Vec<Tip> = windows
            .first()
            .map(|&eps| Tip { position: 0.0, size: tip_size(eps).min(base2) })
            .into_iter()
            .collect();
        let field2 = SizeField::geometric(base2, config.grading, tips2);
        let mut x2p = graded_axis(0.0, geom.d_plus(), &[], &field2)?;
        let mut x2m = graded_axis(-geom.d_minus(), 0.0, &[], &field2)?;

        for _ in 0..config.refinement {
            x1 = bisect(&x1);
            x2p = bisect(&x2p);
            x2m = bisect(&x2m);
        }

        let smallest = x1
            .windows(2)
            .chain(x2p.windows(2))
            .chain(x2m.windows(2))
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if !(smallest > 1e-10 * h) {
            return Err(Error::InvalidMesh(format!(
                "degenerate elements: smallest edge {smallest:e}"
            )));
        }

        let min_tip_edge = windows.first().map(|&eps| {
            let i = x1.iter().position(|&x| x == eps).expect("tip is a breakpoint");
            (x1[i + 1] - x1[i]).min(x1[i] - x1[i - 1]).min(x2p[1] - x2p[0])
        });

        let mut mesh = Self::from_axes(*geom, *config, windows, x1, x2p, x2m);
        mesh.min_tip_edge = min_tip_edge;
        Ok(mesh)
    }

    fn from_axes(
        geometry: WaveguideGeometry,
        config: MeshConfig,
        windows: Vec<f64>,
        x1_vertices: Vec<f64>,
        x2p_vertices: Vec<f64>,
        x2m_vertices: Vec<f64>,
    ) -> Self {
        let quadratic = config.order == ElementOrder::Quadratic;
        let expand = |v: &[f64]| if quadratic { bisect(v) } else { v.to_vec() };
        let x1_nodes = expand(&x1_vertices);
        let x2_plus = expand(&x2p_vertices);
        let x2_minus = expand(&x2m_vertices);
        let cols = x1_nodes.len();

        let mut nodes = Vec::with_capacity(cols * (x2_plus.len() + x2_minus.len()));
        let mut dirichlet = Vec::with_capacity(nodes.capacity());
        for (rows, top_or_bottom) in [(&x2_plus, x2_plus.len() - 1), (&x2_minus, 0)] {
            for (j, &y) in rows.iter().enumerate() {
                for &x in &x1_nodes {
                    nodes.push([x, y]);
                    dirichlet.push(j == top_or_bottom);
                }
            }
        }
        let minus_offset = cols * x2_plus.len();
        let plus_id = |i: usize, j: usize| j * cols + i;
        let minus_id = |i: usize, j: usize| minus_offset + j * cols + i;

        let step = if quadratic { 2 } else { 1 };
        let mut elements = Vec::new();
        for (branch, rows) in [(Branch::Plus, x2_plus.len()), (Branch::Minus, x2_minus.len())] {
            let id = |i: usize, j: usize| match branch {
                Branch::Plus => plus_id(i, j),
                Branch::Minus => minus_id(i, j),
            };
            for j in (0..rows - 1).step_by(step) {
                for i in (0..cols - 1).step_by(step) {
                    let (i2, j2) = (i + step, j + step);
                    if quadratic {
                        let (i1, j1) = (i + 1, j + 1);
                        elements.push(Element {
                            branch,
                            nodes: [id(i, j), id(i2, j), id(i2, j2), id(i1, j), id(i2, j1), id(i1, j1)],
                        });
                        elements.push(Element {
                            branch,
                            nodes: [id(i, j), id(i2, j2), id(i, j2), id(i1, j1), id(i1, j2), id(i, j1)],
                        });
                    } else {
                        elements.push(Element { branch, nodes: [id(i, j), id(i2, j), id(i2, j2), 0, 0, 0] });
                        elements.push(Element { branch, nodes: [id(i, j), id(i2, j2), id(i, j2), 0, 0, 0] });
                    }
                }
            }
        }

        let top_minus = x2_minus.len() - 1;
        let interface = x1_nodes
            .iter()
            .enumerate()
            .map(|(i, &x1)| InterfaceNode {
                x1,
                plus: plus_id(i, 0),
                minus: minus_id(i, top_minus),
                shared: false,
            })
            .collect();
        let mut periodic = Vec::new();
        for j in 0..x2_plus.len() {
            periodic.push((plus_id(0, j), plus_id(cols - 1, j)));
        }
        for j in 0..x2_minus.len() {
            periodic.push((minus_id(0, j), minus_id(cols - 1, j)));
        }

        let node_count = nodes.len();
        Self {
            geometry,
            config,
            windows,
            state: InterfaceState::Closed,
            x1_vertices,
            x1_nodes,
            x2_plus,
            x2_minus,
            nodes,
            elements,
            interface,
            periodic,
            dirichlet,
            dof_of_node: vec![None; node_count],
            dof_count: 0,
            min_tip_edge: None,
        }
    }

    /// The same nodes and elements with a different interface coupling.
    pub fn with_interface(mut self, state: InterfaceState) -> Result<Self> {
        let h = self.geometry.half_period();
        let state = match state {
            InterfaceState::Window(eps) if eps == 0.0 => InterfaceState::Closed,
            InterfaceState::Window(eps) => {
                if !(eps > 0.0 && eps < h) {
                    return Err(Error::InvalidMesh(format!(
                        "window half-width {eps} outside (0, h = {h})"
                    )));
                }
                if !self.x1_vertices.contains(&eps) || !self.x1_vertices.contains(&-eps) {
                    return Err(Error::WindowNotOnGrid { epsilon: eps });
                }
                InterfaceState::Window(eps)
            }
            other => other,
        };
        for node in &mut self.interface {
            node.shared = match state {
                InterfaceState::Closed => false,
                InterfaceState::Window(eps) => node.x1.abs() <= eps,
                InterfaceState::Open => true,
            };
        }
        self.state = state;
        self.number_dofs();
        Ok(self)
    }

    fn number_dofs(&mut self) {
        let n = self.nodes.len();
        // Representative of each node: periodic image first, then the upper
        // copy of a shared interface node.
        let mut rep: Vec<usize> = (0..n).collect();
        for &(left, right) in &self.periodic {
            rep[right] = left;
        }
        let mut merge = vec![usize::MAX; n];
        for node in &self.interface {
            if node.shared {
                merge[node.minus] = node.plus;
            }
        }
        for node in 0..n {
            let r = rep[node];
            if merge[r] != usize::MAX {
                rep[node] = rep[merge[r]];
            }
        }

        let mut provisional = vec![usize::MAX; n];
        let mut owners = Vec::new();
        for node in 0..n {
            let r = rep[node];
            if self.dirichlet[r] {
                continue;
            }
            if provisional[r] == usize::MAX {
                provisional[r] = owners.len();
                owners.push(r);
            }
        }
        let count = owners.len();

        let k = self.config.order.nodes_per_element();
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); count];
        for e in &self.elements {
            let dofs: Vec<usize> = e.nodes[..k]
                .iter()
                .map(|&v| provisional[rep[v]])
                .filter(|&d| d != usize::MAX)
                .collect();
            for &a in &dofs {
                for &b in &dofs {
                    if a != b {
                        adjacency[a].push(b);
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let order = reverse_cuthill_mckee(&adjacency);
        let mut position = vec![0usize; count];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }

        self.dof_of_node = (0..n)
            .map(|node| {
                let p = provisional[rep[node]];
                (p != usize::MAX).then(|| position[p])
            })
            .collect();
        self.dof_count = count;
    }

    pub fn geometry(&self) -> &WaveguideGeometry {
        &self.geometry
    }

    pub fn config(&self) -> &MeshConfig {
        &self.config
    }

    pub fn interface_state(&self) -> InterfaceState {
        self.state
    }

    /// Window half-widths the node layout is graded for.
    pub fn layout_windows(&self) -> &[f64] {
        &self.windows
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn interface(&self) -> &[InterfaceNode] {
        &self.interface
    }

    pub fn periodic_pairs(&self) -> &[(usize, usize)] {
        &self.periodic
    }

    pub fn is_dirichlet(&self, node: usize) -> bool {
        self.dirichlet[node]
    }

    pub fn dof(&self, node: usize) -> Option<usize> {
        self.dof_of_node[node]
    }

    pub fn dof_count(&self) -> usize {
        self.dof_count
    }

    pub fn x1_vertices(&self) -> &[f64] {
        &self.x1_vertices
    }

    pub fn x1_nodes(&self) -> &[f64] {
        &self.x1_nodes
    }

    pub fn x2_nodes(&self, branch: Branch) -> &[f64] {
        match branch {
            Branch::Plus => &self.x2_plus,
            Branch::Minus => &self.x2_minus,
        }
    }

    /// Shortest element edge touching a window tip of the narrowest graded window.
    pub fn min_tip_edge(&self) -> Option<f64> {
        self.min_tip_edge
    }
}

/// Free-function form of [`CellMesh::build`].
pub fn build_mesh(geom: &WaveguideGeometry, config: &MeshConfig) -> Result<CellMesh> {
    CellMesh::build(geom, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> MeshConfig {
        MeshConfig { n1: 8, n2: 4, ..MeshConfig::default() }
    }

    #[test]
    fn closed_interface_duplicates_everything() {
        let g = WaveguideGeometry::new(2.0, 2.3, 0.0).unwrap();
        let m = CellMesh::build(&g, &small()).unwrap();
        assert!(m.interface().iter().all(|n| !n.shared));
        let cols = m.x1_nodes().len() - 1;
        let rows = m.x2_nodes(Branch::Plus).len() - 1 + m.x2_nodes(Branch::Minus).len() - 1;
        assert_eq!(m.dof_count(), cols * rows);
    }

    #[test]
    fn open_interface_shares_everything() {
        let g = WaveguideGeometry::new(2.0, 2.3, 0.0).unwrap();
        let m = CellMesh::build(&g, &small()).unwrap();
        let closed = m.dof_count();
        let m = m.with_interface(InterfaceState::Open).unwrap();
        assert!(m.interface().iter().all(|n| n.shared));
        assert_eq!(m.dof_count(), closed - (m.x1_nodes().len() - 1));
    }

    #[test]
    fn window_tips_are_shared_vertices() {
        let g = WaveguideGeometry::new(2.0, 2.3, 0.01).unwrap();
        let m = CellMesh::build(&g, &small()).unwrap();
        assert!(m.x1_vertices().contains(&0.01));
        assert!(m.x1_vertices().contains(&-0.01));
        for n in m.interface() {
            assert_eq!(n.shared, n.x1.abs() <= 0.01);
            let same = m.dof(n.plus) == m.dof(n.minus);
            assert_eq!(same, n.shared);
        }
        assert!(m.min_tip_edge().unwrap() <= 0.0025 * (1.0 + 1e-12));
    }

    #[test]
    fn dirichlet_and_periodic_rows() {
        let g = WaveguideGeometry::new(2.0, 2.3, 0.0).unwrap();
        let m = CellMesh::build(&g, &small()).unwrap();
        for (node, p) in m.nodes().iter().enumerate() {
            let on_wall = p[1] == g.d_plus() || p[1] == -g.d_minus();
            assert_eq!(m.is_dirichlet(node), on_wall);
            assert_eq!(m.dof(node).is_none(), on_wall);
        }
        for &(l, r) in m.periodic_pairs() {
            assert_eq!(m.nodes()[l][1], m.nodes()[r][1]);
            assert_eq!(m.dof(l), m.dof(r));
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let g = WaveguideGeometry::new(2.0, 2.3, 0.0).unwrap();
        let coarse = MeshConfig { n1: 3, ..small() };
        assert!(CellMesh::build(&g, &coarse).is_err());
        let flat = MeshConfig { grading: 1.0, ..small() };
        let gw = WaveguideGeometry::new(2.0, 2.3, 0.01).unwrap();
        assert!(CellMesh::build(&gw, &flat).is_err());
        let m = CellMesh::build(&g, &small()).unwrap();
        assert!(matches!(
            m.with_interface(InterfaceState::Window(0.3)),
            Err(Error::WindowNotOnGrid { .. })
        ));
    }
}
