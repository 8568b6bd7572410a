//! Lagrange triangles on affine cells.

use super::mesh::ElementOrder;

/// Degree-4 rule on the reference triangle, weights summing to one.
const QUADRATURE: [([f64; 2], f64); 6] = {
    const A1: f64 = 0.445_948_490_915_965;
    const B1: f64 = 1.0 - 2.0 * A1;
    const W1: f64 = 0.223_381_589_678_011;
    const A2: f64 = 0.091_576_213_509_771;
    const B2: f64 = 1.0 - 2.0 * A2;
    const W2: f64 = 0.109_951_743_655_322;
    [
        ([A1, A1], W1),
        ([B1, A1], W1),
        ([A1, B1], W1),
        ([A2, A2], W2),
        ([B2, A2], W2),
        ([A2, B2], W2),
    ]
};

/// Values and reference gradients of the shape functions at `(ξ, η)`.
fn shape(order: ElementOrder, xi: f64, eta: f64) -> ([f64; 6], [[f64; 2]; 6]) {
    let l = [1.0 - xi - eta, xi, eta];
    let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let mut v = [0.0; 6];
    let mut g = [[0.0; 2]; 6];
    match order {
        ElementOrder::Linear => {
            v[..3].copy_from_slice(&l);
            g[..3].copy_from_slice(&dl);
        }
        ElementOrder::Quadratic => {
            for i in 0..3 {
                v[i] = l[i] * (2.0 * l[i] - 1.0);
                let s = 4.0 * l[i] - 1.0;
                g[i] = [s * dl[i][0], s * dl[i][1]];
            }
            for (e, (a, b)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
                v[3 + e] = 4.0 * l[a] * l[b];
                g[3 + e] = [
                    4.0 * (l[a] * dl[b][0] + l[b] * dl[a][0]),
                    4.0 * (l[a] * dl[b][1] + l[b] * dl[a][1]),
                ];
            }
        }
    }
    (v, g)
}

/// Local stiffness, mass and first-order coupling
/// `S_rc = ∫ (φ_c ∂1 φ_r - ∂1 φ_c φ_r)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LocalMatrices {
    pub stiffness: [[f64; 6]; 6],
    pub mass: [[f64; 6]; 6],
    pub coupling: [[f64; 6]; 6],
}

pub(crate) fn local_matrices(order: ElementOrder, vertices: [[f64; 2]; 3]) -> LocalMatrices {
    let n = order.nodes_per_element();
    let [v0, v1, v2] = vertices;
    let j = [[v1[0] - v0[0], v2[0] - v0[0]], [v1[1] - v0[1], v2[1] - v0[1]]];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let area = 0.5 * det.abs();
    // Rows of J^{-T}.
    let inv_t = [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]];

    let mut out = LocalMatrices {
        stiffness: [[0.0; 6]; 6],
        mass: [[0.0; 6]; 6],
        coupling: [[0.0; 6]; 6],
    };
    for &([xi, eta], w) in &QUADRATURE {
        let (v, gref) = shape(order, xi, eta);
        let mut grad = [[0.0; 2]; 6];
        for i in 0..n {
            grad[i] = [
                inv_t[0][0] * gref[i][0] + inv_t[0][1] * gref[i][1],
                inv_t[1][0] * gref[i][0] + inv_t[1][1] * gref[i][1],
            ];
        }
        let wa = w * area;
        for r in 0..n {
            for c in 0..n {
                out.stiffness[r][c] += wa * (grad[r][0] * grad[c][0] + grad[r][1] * grad[c][1]);
                out.mass[r][c] += wa * v[r] * v[c];
                out.coupling[r][c] += wa * (v[c] * grad[r][0] - grad[c][0] * v[r]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRI: [[f64; 2]; 3] = [[0.3, -0.2], [0.8, -0.2], [0.8, 0.1]];

    #[test]
    fn mass_integrates_constants() {
        for order in [ElementOrder::Linear, ElementOrder::Quadratic] {
            let m = local_matrices(order, TRI);
            let total: f64 = m.mass.iter().flatten().sum();
            assert!((total - 0.5 * 0.5 * 0.3).abs() < 1e-14);
        }
    }

    #[test]
    fn stiffness_annihilates_constants_and_is_symmetric() {
        for order in [ElementOrder::Linear, ElementOrder::Quadratic] {
            let m = local_matrices(order, TRI);
            let n = order.nodes_per_element();
            for r in 0..n {
                let row: f64 = m.stiffness[r][..n].iter().sum();
                assert!(row.abs() < 1e-12);
                for c in 0..n {
                    assert!((m.stiffness[r][c] - m.stiffness[c][r]).abs() < 1e-12);
                    assert!((m.coupling[r][c] + m.coupling[c][r]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn quadratic_stiffness_reproduces_a_quadratic_energy() {
        // u = x^2 interpolated exactly by P2: ∫ |∇u|^2 = ∫ 4 x^2.
        let m = local_matrices(ElementOrder::Quadratic, TRI);
        let pts = [
            TRI[0],
            TRI[1],
            TRI[2],
            [0.55, -0.2],
            [0.8, -0.05],
            [0.55, -0.05],
        ];
        let u: [f64; 6] = core::array::from_fn(|i| pts[i][0] * pts[i][0]);
        let mut energy = 0.0;
        for r in 0..6 {
            for c in 0..6 {
                energy += u[r] * m.stiffness[r][c] * u[c];
            }
        }
        // Exact: the triangle is x in [0.3, 0.8], y from -0.2 to -0.2 + 0.6 (x - 0.3).
        let exact = {
            let f = |x: f64| 4.0 * x * x * 0.6 * (x - 0.3);
            let n = 20_000;
            let dx = 0.5 / n as f64;
            (0..n).map(|i| f(0.3 + (i as f64 + 0.5) * dx) * dx).sum::<f64>()
        };
        assert!((energy - exact).abs() < 1e-8);
    }
}
