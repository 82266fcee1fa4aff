//! Points carrying the nonlocal (bond) double integral.

use serde::{Deserialize, Serialize};

use super::{shape, Mesh};
use crate::geometry::Vec2;

/// Quadrature rule used for the bond integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdQuadrature {
    /// One point per element at the centroid, weight = area.
    Centroid,
    /// Four points per element, one per reference sub-cell.
    #[default]
    SubCell,
    /// The continuum Gauss points.
    Gauss,
}

/// Flat list of PD quadrature points. Point ids are indices; the points of
/// element `e` are `first[e]..first[e + 1]`.
///
/// Element geometry never changes on conversion, so the list is built once.
#[derive(Debug, Clone, PartialEq)]
pub struct PdPoints {
    pub positions: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub element: Vec<usize>,
    /// Shape function values at the point, padded to four.
    pub shape_values: Vec<[f64; 4]>,
    pub first: Vec<usize>,
    pub rule: PdQuadrature,
}

impl PdPoints {
    pub fn build(mesh: &Mesh, rule: PdQuadrature) -> PdPoints {
        let mut p = PdPoints {
            positions: Vec::new(),
            weights: Vec::new(),
            element: Vec::new(),
            shape_values: Vec::new(),
            first: Vec::with_capacity(mesh.elements.len() + 1),
            rule,
        };
        for (e, el) in mesh.elements.iter().enumerate() {
            p.first.push(p.positions.len());
            let coords = mesh.element_coords(e);
            let pts: Vec<([f64; 2], f64)> = match rule {
                PdQuadrature::Centroid => vec![(el.shape.center(), f64::NAN)],
                PdQuadrature::SubCell => el.shape.subcell_rule(),
                PdQuadrature::Gauss => el.shape.gauss_rule(),
            };
            for (local, w) in pts {
                let ev = shape::evaluate(el.shape, &coords, local);
                let (pos, weight) = if rule == PdQuadrature::Centroid {
                    // the area centroid differs from the reference centre on
                    // distorted quads
                    (el.centroid, el.area)
                } else {
                    (ev.position, w * ev.det_j)
                };
                p.positions.push(pos);
                p.weights.push(weight);
                p.element.push(e);
                p.shape_values.push(ev.n);
            }
        }
        p.first.push(p.positions.len());
        p
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn of_element(&self, e: usize) -> std::ops::Range<usize> {
        self.first[e]..self.first[e + 1]
    }
}
