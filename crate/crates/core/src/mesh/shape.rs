//! Linear triangle and bilinear quadrilateral shape functions.

use nalgebra::{Matrix2, SMatrix};
use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    Tri3,
    Quad4,
}

const QUAD_CORNERS: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

impl Shape {
    pub fn n_nodes(self) -> usize {
        match self {
            Shape::Tri3 => 3,
            Shape::Quad4 => 4,
        }
    }

    /// Shape function values at reference coordinates.
    ///
    /// Triangles use `(r, s)` area coordinates with `N = (1 - r - s, r, s)`;
    /// quads use `(ξ, η) ∈ [-1, 1]²`.
    pub fn values(self, local: [f64; 2]) -> [f64; 4] {
        let [r, s] = local;
        match self {
            Shape::Tri3 => [1.0 - r - s, r, s, 0.0],
            Shape::Quad4 => {
                let mut n = [0.0; 4];
                for (a, c) in QUAD_CORNERS.iter().enumerate() {
                    n[a] = 0.25 * (1.0 + c[0] * r) * (1.0 + c[1] * s);
                }
                n
            }
        }
    }

    /// Derivatives of the shape functions with respect to the reference
    /// coordinates, `[a][k] = dN_a / d local_k`.
    pub fn local_gradients(self, local: [f64; 2]) -> [[f64; 2]; 4] {
        let [r, s] = local;
        match self {
            Shape::Tri3 => [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0], [0.0, 0.0]],
            Shape::Quad4 => {
                let mut g = [[0.0; 2]; 4];
                for (a, c) in QUAD_CORNERS.iter().enumerate() {
                    g[a][0] = 0.25 * c[0] * (1.0 + c[1] * s);
                    g[a][1] = 0.25 * c[1] * (1.0 + c[0] * r);
                }
                g
            }
        }
    }

    /// Reference coordinates of the element centre.
    pub fn center(self) -> [f64; 2] {
        match self {
            Shape::Tri3 => [1.0 / 3.0, 1.0 / 3.0],
            Shape::Quad4 => [0.0, 0.0],
        }
    }

    /// Gauss rule used for the continuum term: `(local, reference weight)`.
    pub fn gauss_rule(self) -> Vec<([f64; 2], f64)> {
        match self {
            Shape::Tri3 => vec![([1.0 / 3.0, 1.0 / 3.0], 0.5)],
            Shape::Quad4 => {
                let g = 1.0 / 3f64.sqrt();
                vec![
                    ([-g, -g], 1.0),
                    ([g, -g], 1.0),
                    ([g, g], 1.0),
                    ([-g, g], 1.0),
                ]
            }
        }
    }

    /// Sub-cell midpoint rule: the element is split into four congruent
    /// sub-cells in reference space and each contributes its centre.
    pub fn subcell_rule(self) -> Vec<([f64; 2], f64)> {
        match self {
            Shape::Tri3 => vec![
                ([1.0 / 6.0, 1.0 / 6.0], 0.125),
                ([2.0 / 3.0, 1.0 / 6.0], 0.125),
                ([1.0 / 6.0, 2.0 / 3.0], 0.125),
                ([1.0 / 3.0, 1.0 / 3.0], 0.125),
            ],
            Shape::Quad4 => vec![
                ([-0.5, -0.5], 1.0),
                ([0.5, -0.5], 1.0),
                ([0.5, 0.5], 1.0),
                ([-0.5, 0.5], 1.0),
            ],
        }
    }

    /// Local edges as pairs of local vertex indices, counter-clockwise.
    pub fn edges(self) -> &'static [(usize, usize)] {
        match self {
            Shape::Tri3 => &[(0, 1), (1, 2), (2, 0)],
            Shape::Quad4 => &[(0, 1), (1, 2), (2, 3), (3, 0)],
        }
    }

    pub fn vtk_cell_type(self) -> u8 {
        match self {
            Shape::Tri3 => 5,
            Shape::Quad4 => 9,
        }
    }
}

/// Geometry of one element evaluated at one reference point.
#[derive(Debug, Clone, Copy)]
pub struct PointEval {
    pub n: [f64; 4],
    /// Physical gradients `[a] = (dN_a/dx, dN_a/dy)`.
    pub grad: [[f64; 2]; 4],
    pub det_j: f64,
    pub position: Vec2,
}

pub fn evaluate(shape: Shape, coords: &[Vec2], local: [f64; 2]) -> PointEval {
    let n = shape.values(local);
    let dl = shape.local_gradients(local);
    let nn = shape.n_nodes();
    let mut jac = Matrix2::zeros();
    let mut position = Vec2::zeros();
    for a in 0..nn {
        position += coords[a] * n[a];
        for k in 0..2 {
            jac[(0, k)] += coords[a].x * dl[a][k];
            jac[(1, k)] += coords[a].y * dl[a][k];
        }
    }
    let det_j = jac.determinant();
    let inv = jac.try_inverse().unwrap_or_else(Matrix2::zeros);
    let mut grad = [[0.0; 2]; 4];
    for a in 0..nn {
        // dN/dx_i = dN/dlocal_k * dlocal_k/dx_i
        for i in 0..2 {
            grad[a][i] = dl[a][0] * inv[(0, i)] + dl[a][1] * inv[(1, i)];
        }
    }
    PointEval {
        n,
        grad,
        det_j,
        position,
    }
}

/// Strain-displacement matrix in Voigt order `(εxx, εyy, γxy)` for an
/// 8-column (quad) layout; triangles use the first six columns.
pub fn b_matrix(eval: &PointEval, n_nodes: usize) -> SMatrix<f64, 3, 8> {
    let mut b = SMatrix::<f64, 3, 8>::zeros();
    for a in 0..n_nodes {
        let [dx, dy] = eval.grad[a];
        b[(0, 2 * a)] = dx;
        b[(1, 2 * a + 1)] = dy;
        b[(2, 2 * a)] = dy;
        b[(2, 2 * a + 1)] = dx;
    }
    b
}
