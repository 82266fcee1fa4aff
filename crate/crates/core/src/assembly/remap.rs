//! State transfer after CE→DE conversion.

use super::mass::{element_lumped, MassMatrix};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, NodeMap};

/// Extends dof vectors to the converted mesh and splits lumped masses.
///
/// New node ids copy the values of the node they were split from. The mass
/// of a split node is shared among its descendants in proportion to their
/// element contributions, so per-site sums are unchanged.
pub fn remap_after_conversion(
    map: &NodeMap,
    mesh: &Mesh,
    rho: f64,
    mass: &mut MassMatrix,
    vectors: &mut [&mut Vec<f64>],
) -> Result<()> {
    let lumped = match mass {
        MassMatrix::Lumped(m) => m,
        MassMatrix::Consistent(_) => {
            return Err(Error::Unsupported(
                "consistent mass cannot follow CE→DE conversion; use lumped mass".into(),
            ))
        }
    };
    let n_new = mesh.n_nodes();
    for v in vectors.iter_mut() {
        if v.len() != 2 * lumped.len() {
            return Err(Error::Consistency(format!(
                "dof vector of length {} does not match {} nodes before remap",
                v.len(),
                lumped.len()
            )));
        }
        v.resize(2 * n_new, 0.0);
        for (old, new) in map.new_ids() {
            v[2 * new] = v[2 * old];
            v[2 * new + 1] = v[2 * old + 1];
        }
    }
    if map.is_empty() {
        return Ok(());
    }
    // element contributions per node of the converted mesh
    let mut contrib = vec![0.0; n_new];
    for (e, el) in mesh.elements.iter().enumerate() {
        let c = element_lumped(mesh, e, rho);
        for (a, &n) in el.nodes.iter().enumerate() {
            contrib[n] += c[a];
        }
    }
    lumped.resize(n_new, 0.0);
    for (&old, ids) in &map.pairs {
        let site_mass = lumped[old];
        let total: f64 = ids.iter().map(|&n| contrib[n]).sum();
        for &n in ids {
            lumped[n] = site_mass * contrib[n] / total;
        }
    }
    if let Some(i) = lumped.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::SingularMass(2 * i));
    }
    Ok(())
}
