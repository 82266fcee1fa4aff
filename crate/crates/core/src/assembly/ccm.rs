//! Continuum stiffness `Σ ∫ Bᵀ E(x) B dV`, kept element by element.

use nalgebra::{Matrix3, SMatrix, SVector};

use super::sparse::SparseMatrix;
use crate::geometry::Vec2;
use crate::mesh::{shape, Mesh};

pub type ElementMatrix = SMatrix<f64, 8, 8>;

#[derive(Debug, Clone)]
pub struct CcmOperator {
    /// Gauss points of element `e` are `gp_first[e]..gp_first[e + 1]`.
    pub gp_first: Vec<usize>,
    /// E(x) at each Gauss point, Voigt, MPa.
    pub gp_stiffness: Vec<Matrix3<f64>>,
    pub ke: Vec<ElementMatrix>,
}

/// Gauss point positions of the whole mesh in element order.
pub fn gauss_positions(mesh: &Mesh) -> Vec<Vec2> {
    mesh.elements
        .iter()
        .flat_map(|el| el.quad_points.iter().map(|q| q.position))
        .collect()
}

pub fn element_matrix(mesh: &Mesh, e: usize, gp_e: &[Matrix3<f64>]) -> ElementMatrix {
    let el = &mesh.elements[e];
    let coords = mesh.element_coords(e);
    let n = el.shape.n_nodes();
    let mut k = ElementMatrix::zeros();
    for (q, qp) in el.quad_points.iter().enumerate() {
        let ev = shape::evaluate(el.shape, &coords, qp.local);
        let b = shape::b_matrix(&ev, n);
        k += b.transpose() * gp_e[q] * b * qp.weight;
    }
    // exact symmetry
    (k + k.transpose()) * 0.5
}

impl CcmOperator {
    /// Operator with E(x) = `e0` at every Gauss point.
    pub fn new(mesh: &Mesh, e0: &Matrix3<f64>) -> CcmOperator {
        let mut gp_first = Vec::with_capacity(mesh.elements.len() + 1);
        let mut count = 0;
        for el in &mesh.elements {
            gp_first.push(count);
            count += el.quad_points.len();
        }
        gp_first.push(count);
        let gp_stiffness = vec![*e0; count];
        let ke = (0..mesh.elements.len())
            .map(|e| element_matrix(mesh, e, &gp_stiffness[gp_first[e]..gp_first[e + 1]]))
            .collect();
        CcmOperator {
            gp_first,
            gp_stiffness,
            ke,
        }
    }

    pub fn n_gauss_points(&self) -> usize {
        self.gp_stiffness.len()
    }

    /// Element owning Gauss point `g`.
    pub fn element_of_gp(&self, g: usize) -> usize {
        self.gp_first.partition_point(|&f| f <= g) - 1
    }

    /// Recomputes the matrices of `elements` from the current E(x).
    pub fn rebuild(&mut self, mesh: &Mesh, elements: &[usize]) {
        for &e in elements {
            let r = self.gp_first[e]..self.gp_first[e + 1];
            self.ke[e] = element_matrix(mesh, e, &self.gp_stiffness[r]);
        }
    }

    /// `out += K u` with dofs `2n, 2n + 1` per node.
    pub fn apply(&self, mesh: &Mesh, u: &[f64], out: &mut [f64]) {
        for (e, el) in mesh.elements.iter().enumerate() {
            let n = el.nodes.len();
            let mut ue = SVector::<f64, 8>::zeros();
            for (a, &node) in el.nodes.iter().enumerate() {
                ue[2 * a] = u[2 * node];
                ue[2 * a + 1] = u[2 * node + 1];
            }
            let fe = self.ke[e] * ue;
            for (a, &node) in el.nodes.iter().enumerate().take(n) {
                out[2 * node] += fe[2 * a];
                out[2 * node + 1] += fe[2 * a + 1];
            }
        }
    }

    pub fn to_sparse(&self, mesh: &Mesh) -> SparseMatrix {
        let mut trip = Vec::new();
        for (e, el) in mesh.elements.iter().enumerate() {
            let n = el.nodes.len();
            for a in 0..2 * n {
                for b in 0..2 * n {
                    let ra = 2 * el.nodes[a / 2] + a % 2;
                    let cb = 2 * el.nodes[b / 2] + b % 2;
                    trip.push((ra, cb, self.ke[e][(a, b)]));
                }
            }
        }
        SparseMatrix::from_triplets(mesh.n_dofs(), trip)
    }

    /// Strain (Voigt) at reference point `local` of element `e`.
    pub fn strain(mesh: &Mesh, e: usize, local: [f64; 2], u: &[f64]) -> nalgebra::Vector3<f64> {
        let el = &mesh.elements[e];
        let coords = mesh.element_coords(e);
        let ev = shape::evaluate(el.shape, &coords, local);
        let mut eps = nalgebra::Vector3::zeros();
        for (a, &node) in el.nodes.iter().enumerate() {
            let [dx, dy] = ev.grad[a];
            let (ux, uy) = (u[2 * node], u[2 * node + 1]);
            eps[0] += dx * ux;
            eps[1] += dy * uy;
            eps[2] += dy * ux + dx * uy;
        }
        eps
    }

    /// Continuum strain energy `½ Σ εᵀ E ε w` at the Gauss points.
    pub fn energy(&self, mesh: &Mesh, u: &[f64]) -> f64 {
        let mut w = 0.0;
        for (e, el) in mesh.elements.iter().enumerate() {
            for (q, qp) in el.quad_points.iter().enumerate() {
                let eps = Self::strain(mesh, e, qp.local, u);
                let c = &self.gp_stiffness[self.gp_first[e] + q];
                w += 0.5 * (eps.transpose() * c * eps)[(0, 0)] * qp.weight;
            }
        }
        w
    }
}
