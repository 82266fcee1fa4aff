//! Bond stiffness as a bond-list operator.
//!
//! A bond of coefficient `k = 2 ᾱ c⁰ w w'` stores energy `½ k (ξ·d)²`, with
//! `d` the relative displacement of its endpoints interpolated from the
//! element nodes.

use rayon::prelude::*;

use super::sparse::SparseMatrix;
use crate::bonds::BondTable;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::mesh::{Mesh, PdPoints};

#[derive(Debug, Clone, Default)]
pub struct PdOperator {
    /// Coefficient per bond id (0 when ᾱ = 0).
    pub k: Vec<f64>,
    /// Bond still part of the operator (not subtracted).
    included: Vec<bool>,
    /// Included bonds with k > 0, ascending.
    active: Vec<u32>,
}

impl PdOperator {
    /// Fresh assembly from the table statuses and α at the PD points.
    pub fn assemble(table: &BondTable, pd_alpha: &[f64]) -> PdOperator {
        let mut op = PdOperator::default();
        op.sync(table, pd_alpha);
        op
    }

    /// Picks up new bonds and recomputes every coefficient from `pd_alpha`.
    /// Bonds broken in the table are dropped.
    pub fn sync(&mut self, table: &BondTable, pd_alpha: &[f64]) {
        let n = table.bonds.len();
        self.k.resize(n, 0.0);
        self.included.resize(n, true);
        self.k
            .par_iter_mut()
            .zip(self.included.par_iter_mut())
            .zip(table.bonds.par_iter())
            .for_each(|((k, inc), b)| {
                *inc &= b.intact;
                let abar = 0.5 * (pd_alpha[b.i as usize] + pd_alpha[b.j as usize]);
                *k = if *inc { 2.0 * abar * b.c0 * b.weight_product } else { 0.0 };
            });
        self.active = (0..n as u32)
            .filter(|&b| self.included[b as usize] && self.k[b as usize] > 0.0)
            .collect();
    }

    pub fn active(&self) -> &[u32] {
        &self.active
    }

    pub fn is_included(&self, b: usize) -> bool {
        self.included.get(b).copied().unwrap_or(false)
    }

    /// Removes the contributions of `ids`; each must still be included.
    pub fn subtract_broken_bonds(&mut self, ids: &[u32]) -> Result<()> {
        if ids.is_empty() {
            return Ok(());
        }
        for &b in ids {
            if !self.is_included(b as usize) {
                return Err(Error::Consistency(format!("bond {b} was already subtracted")));
            }
        }
        for &b in ids {
            self.included[b as usize] = false;
            self.k[b as usize] = 0.0;
        }
        let mut gone = ids.to_vec();
        gone.sort_unstable();
        self.active.retain(|b| gone.binary_search(b).is_err());
        Ok(())
    }

    /// `out += K_pd u`; `up` is scratch for the PD point displacements.
    pub fn apply(
        &self,
        table: &BondTable,
        mesh: &Mesh,
        points: &PdPoints,
        u: &[f64],
        up: &mut Vec<Vec2>,
        out: &mut [f64],
    ) {
        if self.active.is_empty() {
            return;
        }
        point_displacements_into(mesh, points, u, up);
        let mut fp = vec![Vec2::zeros(); points.len()];
        for &b in &self.active {
            let bd = &table.bonds[b as usize];
            let (i, j) = (bd.i as usize, bd.j as usize);
            let d = up[j] - up[i];
            let f = bd.xi * (self.k[b as usize] * bd.xi.dot(&d));
            fp[j] += f;
            fp[i] -= f;
        }
        scatter(mesh, points, &fp, out);
    }

    /// Bond energy `Σ ½ k (ξ·d)²`.
    pub fn energy(&self, table: &BondTable, mesh: &Mesh, points: &PdPoints, u: &[f64]) -> f64 {
        let up = point_displacements(mesh, points, u);
        self.active
            .iter()
            .map(|&b| {
                let bd = &table.bonds[b as usize];
                let s = bd.xi.dot(&(up[bd.j as usize] - up[bd.i as usize]));
                0.5 * self.k[b as usize] * s * s
            })
            .sum()
    }

    pub fn to_sparse(&self, table: &BondTable, mesh: &Mesh, points: &PdPoints) -> SparseMatrix {
        let mut trip = Vec::new();
        for &b in &self.active {
            let bd = &table.bonds[b as usize];
            let k = self.k[b as usize];
            // D = N_j − N_i as (node, factor) pairs; K = k Dᵀ (ξξᵀ) D
            let mut terms: Vec<(usize, f64)> = Vec::with_capacity(8);
            for (p, sign) in [(bd.j as usize, 1.0), (bd.i as usize, -1.0)] {
                let el = &mesh.elements[points.element[p]];
                for (a, &node) in el.nodes.iter().enumerate() {
                    terms.push((node, sign * points.shape_values[p][a]));
                }
            }
            let xx = [[bd.xi.x * bd.xi.x, bd.xi.x * bd.xi.y], [bd.xi.y * bd.xi.x, bd.xi.y * bd.xi.y]];
            for &(na, fa) in &terms {
                for &(nb, fb) in &terms {
                    for r in 0..2 {
                        for c in 0..2 {
                            trip.push((2 * na + r, 2 * nb + c, k * fa * fb * xx[r][c]));
                        }
                    }
                }
            }
        }
        SparseMatrix::from_triplets(mesh.n_dofs(), trip)
    }
}

/// `u_p = Σ N_a(x_p) u_a`.
pub fn point_displacements(mesh: &Mesh, points: &PdPoints, u: &[f64]) -> Vec<Vec2> {
    let mut up = Vec::new();
    point_displacements_into(mesh, points, u, &mut up);
    up
}

pub fn point_displacements_into(mesh: &Mesh, points: &PdPoints, u: &[f64], up: &mut Vec<Vec2>) {
    up.resize(points.len(), Vec2::zeros());
    up.par_iter_mut().enumerate().for_each(|(p, v)| {
        let el = &mesh.elements[points.element[p]];
        let nv = &points.shape_values[p];
        let mut s = Vec2::zeros();
        for (a, &node) in el.nodes.iter().enumerate() {
            s.x += nv[a] * u[2 * node];
            s.y += nv[a] * u[2 * node + 1];
        }
        *v = s;
    });
}

/// Adds point forces to the nodes through the shape functions.
pub fn scatter(mesh: &Mesh, points: &PdPoints, fp: &[Vec2], out: &mut [f64]) {
    for (p, f) in fp.iter().enumerate() {
        if f.x == 0.0 && f.y == 0.0 {
            continue;
        }
        let el = &mesh.elements[points.element[p]];
        let nv = &points.shape_values[p];
        for (a, &node) in el.nodes.iter().enumerate() {
            out[2 * node] += nv[a] * f.x;
            out[2 * node + 1] += nv[a] * f.y;
        }
    }
}
