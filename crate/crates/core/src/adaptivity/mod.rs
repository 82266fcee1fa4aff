//! Damage detection, flag points, PD subdomain expansion and the
//! expansion-radius check.

mod coupling;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::assembly::CcmOperator;
use crate::bonds::BondTable;
use crate::geometry::Vec2;
use crate::mesh::{Mesh, PdPoints};
use crate::morphing::FlagPoint;
pub use coupling::{Coupling, ExpansionEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionMode {
    BrokenBond,
    Strength,
}

/// Shear term of the equivalent stress.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VonMisesForm {
    /// `6 (σ12² + σ23² + σ31²)`.
    #[default]
    Standard,
    /// `6 (σ12 + σ23 + σ31)²`, as sometimes printed.
    Literal,
}

/// Full 3D symmetric stress `[σ11, σ22, σ33, σ12, σ23, σ31]`, MPa.
pub fn von_mises(s: &[f64; 6]) -> f64 {
    von_mises_with(s, VonMisesForm::Standard)
}

pub fn von_mises_with(s: &[f64; 6], form: VonMisesForm) -> f64 {
    let [s11, s22, s33, s12, s23, s31] = *s;
    let shear = match form {
        VonMisesForm::Standard => s12 * s12 + s23 * s23 + s31 * s31,
        VonMisesForm::Literal => (s12 + s23 + s31).powi(2),
    };
    (((s11 - s22).powi(2) + (s22 - s33).powi(2) + (s33 - s11).powi(2) + 6.0 * shear) / 2.0).sqrt()
}

/// Plane stress from Voigt `(σxx, σyy, σxy)`.
pub fn von_mises_plane(s: &Vector3<f64>, form: VonMisesForm) -> f64 {
    von_mises_with(&[s[0], s[1], 0.0, s[2], 0.0, 0.0], form)
}

/// Centroid stresses `σ = E(x) : ε` of every element.
pub fn centroid_stresses(mesh: &Mesh, u: &[f64], centroid_stiffness: &[Matrix3<f64>]) -> Vec<Vector3<f64>> {
    use rayon::prelude::*;
    (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| {
            let eps = CcmOperator::strain(mesh, e, mesh.elements[e].shape.center(), u);
            centroid_stiffness[e] * eps
        })
        .collect()
}

/// Centroids of the endpoint elements of newly broken bonds, skipping
/// elements flagged before. Returns `(element, flag)` pairs in element order.
/// `radii` are `(r_p, R_p)` of the new flags.
pub fn flags_from_broken_bonds(
    broken: &[u32],
    table: &BondTable,
    points: &PdPoints,
    mesh: &Mesh,
    flagged: &mut [bool],
    t: f64,
    radii: (f64, f64),
) -> Vec<(usize, FlagPoint)> {
    let mut elems: Vec<usize> = broken
        .iter()
        .flat_map(|&b| {
            let bd = &table.bonds[b as usize];
            [points.element[bd.i as usize], points.element[bd.j as usize]]
        })
        .collect();
    elems.sort_unstable();
    elems.dedup();
    elems
        .into_iter()
        .filter(|&e| !std::mem::replace(&mut flagged[e], true))
        .map(|e| (e, FlagPoint::point(mesh.elements[e].centroid, t, radii.0, radii.1)))
        .collect()
}

/// Centroids whose equivalent stress reaches `sigma_crit`.
#[allow(clippy::too_many_arguments)]
pub fn flags_from_strength(
    mesh: &Mesh,
    u: &[f64],
    centroid_stiffness: &[Matrix3<f64>],
    sigma_crit: f64,
    form: VonMisesForm,
    flagged: &mut [bool],
    t: f64,
    radii: (f64, f64),
) -> Vec<(usize, FlagPoint)> {
    let stresses = centroid_stresses(mesh, u, centroid_stiffness);
    let mut out = Vec::new();
    for (e, s) in stresses.iter().enumerate() {
        if !flagged[e] && von_mises_plane(s, form) >= sigma_crit {
            flagged[e] = true;
            out.push((e, FlagPoint::point(mesh.elements[e].centroid, t, radii.0, radii.1)));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusCheck {
    pub ok: bool,
    pub covers_min_edge: bool,
    pub covers_rayleigh_step: bool,
    /// `C_R Δt`, mm.
    pub rayleigh_step: f64,
}

/// `r_p ≥ L` and `r_p ≥ C_R Δt`.
pub fn check_expansion_radius(r_p: f64, l_min: f64, dt: f64, c_r: f64) -> RadiusCheck {
    let rayleigh_step = c_r * dt;
    let covers_min_edge = r_p >= l_min;
    let covers_rayleigh_step = r_p >= rayleigh_step;
    RadiusCheck {
        ok: covers_min_edge && covers_rayleigh_step,
        covers_min_edge,
        covers_rayleigh_step,
        rayleigh_step,
    }
}

/// Midpoint of a bond in the reference configuration.
pub fn bond_midpoint(table: &BondTable, points: &PdPoints, b: u32) -> Vec2 {
    let bd = &table.bonds[b as usize];
    (points.positions[bd.i as usize] + points.positions[bd.j as usize]) * 0.5
}
