//! Discrete operators: mass, hybrid stiffness, loads and state remapping.
//!
//! Dof layout: node `n` owns dofs `2n` (x) and `2n + 1` (y).

pub mod ccm;
pub mod load;
pub mod mass;
pub mod pd;
pub mod remap;
pub mod sparse;

pub use ccm::CcmOperator;
pub use load::{
    assemble_load, bind_constraints, explosion_load, ramp_traction, BoundLoads, BoundarySelector, Component,
    Constraint, ExplosionLoad, LoadHistory, LoadProgram, Traction, TractionDirection,
};
pub use mass::{assemble_mass, MassMatrix, MassMode};
pub use pd::{point_displacements, PdOperator};
pub use remap::remap_after_conversion;
pub use sparse::SparseMatrix;

/// Node to dof mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofMap {
    pub total_dofs: usize,
}

impl DofMap {
    pub fn new(n_nodes: usize) -> DofMap {
        DofMap {
            total_dofs: 2 * n_nodes,
        }
    }

    pub fn dofs(&self, node: usize) -> (usize, usize) {
        (2 * node, 2 * node + 1)
    }
}

/// Reactions `K u − F` at prescribed dofs.
pub fn reactions(ku: &[f64], f: &[f64], prescribed: &[(usize, f64)]) -> Vec<(usize, f64)> {
    prescribed.iter().map(|&(d, _)| (d, ku[d] - f[d])).collect()
}
