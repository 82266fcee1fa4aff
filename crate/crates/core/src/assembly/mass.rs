//! Mass matrix: consistent `∫ ρ Nᵀ N dV` or its row-sum lumping.

use serde::{Deserialize, Serialize};

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use crate::mesh::{shape, Mesh, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassMode {
    Consistent,
    #[default]
    Lumped,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MassMatrix {
    /// Nodal masses (same for both dofs of a node), t.
    Lumped(Vec<f64>),
    Consistent(SparseMatrix),
}

impl MassMatrix {
    pub fn lumped(&self) -> Option<&[f64]> {
        match self {
            MassMatrix::Lumped(m) => Some(m),
            MassMatrix::Consistent(_) => None,
        }
    }

    pub fn total(&self) -> f64 {
        match self {
            MassMatrix::Lumped(m) => m.iter().sum(),
            // both dofs of a node carry the node mass
            MassMatrix::Consistent(m) => 0.5 * m.val.iter().sum::<f64>(),
        }
    }
}

/// Rule exact for products of two shape functions.
fn mass_rule(shape: Shape) -> Vec<([f64; 2], f64)> {
    match shape {
        Shape::Tri3 => vec![
            ([1.0 / 6.0, 1.0 / 6.0], 1.0 / 6.0),
            ([2.0 / 3.0, 1.0 / 6.0], 1.0 / 6.0),
            ([1.0 / 6.0, 2.0 / 3.0], 1.0 / 6.0),
        ],
        Shape::Quad4 => shape.gauss_rule(),
    }
}

/// Element consistent mass per unit density (scalar block, `n×n`).
pub fn element_scalar_mass(mesh: &Mesh, e: usize) -> [[f64; 4]; 4] {
    let el = &mesh.elements[e];
    let coords = mesh.element_coords(e);
    let n = el.shape.n_nodes();
    let mut m = [[0.0; 4]; 4];
    for (local, w) in mass_rule(el.shape) {
        let ev = shape::evaluate(el.shape, &coords, local);
        let wt = w * ev.det_j;
        for a in 0..n {
            for b in 0..n {
                m[a][b] += ev.n[a] * ev.n[b] * wt;
            }
        }
    }
    m
}

/// Row sums of the element mass: each local node's share, t.
pub fn element_lumped(mesh: &Mesh, e: usize, rho: f64) -> [f64; 4] {
    let m = element_scalar_mass(mesh, e);
    let mut out = [0.0; 4];
    for a in 0..mesh.elements[e].shape.n_nodes() {
        out[a] = rho * m[a].iter().sum::<f64>();
    }
    out
}

pub fn assemble_mass(mesh: &Mesh, rho: f64, mode: MassMode) -> Result<MassMatrix> {
    if !(rho > 0.0) {
        return Err(Error::param(format!("density must be positive, got {rho}")));
    }
    match mode {
        MassMode::Lumped => {
            let mut m = vec![0.0; mesh.n_nodes()];
            for (e, el) in mesh.elements.iter().enumerate() {
                let c = element_lumped(mesh, e, rho);
                for (a, &n) in el.nodes.iter().enumerate() {
                    m[n] += c[a];
                }
            }
            if let Some(i) = m.iter().position(|&v| !(v > 0.0)) {
                return Err(Error::SingularMass(2 * i));
            }
            Ok(MassMatrix::Lumped(m))
        }
        MassMode::Consistent => {
            let mut trip = Vec::new();
            for (e, el) in mesh.elements.iter().enumerate() {
                let m = element_scalar_mass(mesh, e);
                for (a, &na) in el.nodes.iter().enumerate() {
                    for (b, &nb) in el.nodes.iter().enumerate() {
                        for k in 0..2 {
                            trip.push((2 * na + k, 2 * nb + k, rho * m[a][b]));
                        }
                    }
                }
            }
            Ok(MassMatrix::Consistent(SparseMatrix::from_triplets(mesh.n_dofs(), trip)))
        }
    }
}
