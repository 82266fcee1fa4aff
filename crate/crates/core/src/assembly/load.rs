//! Boundary selection, load histories, nodal load vectors and prescribed
//! displacements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::mesh::{shape, BoundaryEdge, Mesh};

/// Picks boundary edges (or, for constraints, their nodes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundarySelector {
    Left,
    Right,
    Bottom,
    Top,
    /// Edges whose midpoint lies within `tol` of the circle.
    Circle {
        center: [f64; 2],
        radius: f64,
        tol: f64,
    },
    /// Edges whose midpoint lies inside the box.
    Box { min: [f64; 2], max: [f64; 2] },
}

impl BoundarySelector {
    /// Edges of `edges` matching the selector on a mesh with bounds
    /// `(lo, hi)`.
    pub fn select<'a>(&self, edges: &'a [BoundaryEdge], lo: Vec2, hi: Vec2, h: f64) -> Vec<&'a BoundaryEdge> {
        let tol = 1e-6 * h.max(1e-12);
        edges
            .iter()
            .filter(|e| {
                let m = e.midpoint;
                match self {
                    BoundarySelector::Left => (m.x - lo.x).abs() < tol && e.normal.x < -0.5,
                    BoundarySelector::Right => (m.x - hi.x).abs() < tol && e.normal.x > 0.5,
                    BoundarySelector::Bottom => (m.y - lo.y).abs() < tol && e.normal.y < -0.5,
                    BoundarySelector::Top => (m.y - hi.y).abs() < tol && e.normal.y > 0.5,
                    BoundarySelector::Circle { center, radius, tol } => {
                        ((m - Vec2::new(center[0], center[1])).norm() - radius).abs() <= *tol
                    }
                    BoundarySelector::Box { min, max } => {
                        m.x >= min[0] && m.x <= max[0] && m.y >= min[1] && m.y <= max[1]
                    }
                }
            })
            .collect()
    }
}

/// Linear ramp to `sigma0` over `t0`, then constant.
pub fn ramp_traction(t: f64, sigma0: f64, t0: f64) -> f64 {
    if t <= t0 {
        sigma0 * t / t0
    } else {
        sigma0
    }
}

/// Blast pressure history built from a rise and a decay factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplosionLoad {
    /// Peak pressure, MPa.
    pub p0: f64,
    /// Maximum rise rate, 1/s.
    pub m_u: f64,
    /// Maximum decay rate, 1/s.
    pub m_d: f64,
    #[serde(default = "default_alpha1")]
    pub alpha1: f64,
    #[serde(default = "default_alpha2")]
    pub alpha2: f64,
}

fn default_alpha1() -> f64 {
    1e-7
}

fn default_alpha2() -> f64 {
    1e-3
}

impl ExplosionLoad {
    pub fn g(&self) -> u32 {
        ((2.0 * std::f64::consts::E).sqrt() * self.m_u / self.m_d).round() as u32
    }

    fn rate(&self) -> f64 {
        std::f64::consts::E / (2.0 * self.g() as f64) * self.m_u
    }

    /// Centre of the rise factor, s.
    pub fn t_u(&self) -> f64 {
        let g2 = 2.0 * self.g() as f64;
        (-self.alpha1.ln()).powf(1.0 / g2) / self.rate()
    }

    /// Peak time, s.
    pub fn t_d(&self) -> f64 {
        let g2 = 2.0 * self.g() as f64;
        ((-self.alpha1.ln()).powf(1.0 / g2) - (-(1.0 - self.alpha2).ln()).powf(1.0 / g2)) / self.rate()
    }

    pub fn pressure(&self, t: f64) -> f64 {
        let g2 = 2 * self.g() as i32;
        let pu = (-(self.rate() * (t - self.t_u())).powi(g2)).exp();
        let pd = (-((2.0 * std::f64::consts::E).sqrt() / 2.0 * self.m_d * (t - self.t_d())).powi(2)).exp();
        self.p0 * pu * pd
    }
}

pub fn explosion_load(t: f64, p0: f64, m_u: f64, m_d: f64, alpha1: f64, alpha2: f64) -> f64 {
    ExplosionLoad {
        p0,
        m_u,
        m_d,
        alpha1,
        alpha2,
    }
    .pressure(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LoadHistory {
    Constant { value: f64 },
    Ramp { sigma0: f64, t0: f64 },
    Explosion(ExplosionLoad),
}

impl LoadHistory {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            LoadHistory::Constant { value } => *value,
            LoadHistory::Ramp { sigma0, t0 } => ramp_traction(t, *sigma0, *t0),
            LoadHistory::Explosion(x) => x.pressure(t),
        }
    }
}

/// How the scalar history maps to a traction vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TractionDirection {
    /// `value · n` (positive pulls the surface outwards).
    Normal,
    /// Pressure: `−value · n`.
    Pressure,
    Fixed { x: f64, y: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Traction {
    pub region: BoundarySelector,
    pub direction: TractionDirection,
    pub history: LoadHistory,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadProgram {
    #[serde(default)]
    pub tractions: Vec<Traction>,
    /// Constant body force density, N/mm³.
    #[serde(default)]
    pub body_force: Option<[f64; 2]>,
}

/// A load program resolved to boundary edges of the current mesh.
#[derive(Debug, Clone, Default)]
pub struct BoundLoads {
    /// `(traction index, edge)`.
    edges: Vec<(usize, BoundaryEdge)>,
    /// Per-node body-force resultant (constant in time).
    body: Vec<f64>,
}

impl LoadProgram {
    pub fn bind(&self, mesh: &Mesh) -> Result<BoundLoads> {
        let edges = mesh.boundary_edges();
        let (lo, hi) = mesh.bounds();
        let mut bound = Vec::new();
        for (k, tr) in self.tractions.iter().enumerate() {
            let sel = tr.region.select(&edges, lo, hi, mesh.avg_element_size);
            if sel.is_empty() {
                return Err(Error::Binding(format!(
                    "traction {k} region {:?} matches no boundary edge",
                    tr.region
                )));
            }
            bound.extend(sel.into_iter().map(|e| (k, *e)));
        }
        let mut body = vec![0.0; mesh.n_dofs()];
        if let Some(b) = self.body_force {
            for (e, el) in mesh.elements.iter().enumerate() {
                let coords = mesh.element_coords(e);
                for qp in &el.quad_points {
                    let ev = shape::evaluate(el.shape, &coords, qp.local);
                    for (a, &n) in el.nodes.iter().enumerate() {
                        body[2 * n] += ev.n[a] * b[0] * qp.weight;
                        body[2 * n + 1] += ev.n[a] * b[1] * qp.weight;
                    }
                }
            }
        }
        Ok(BoundLoads { edges: bound, body })
    }
}

impl BoundLoads {
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Nodal force vector at time `t`, N. Constant tractions on straight
    /// edges split evenly between the two end nodes.
    pub fn assemble(&self, program: &LoadProgram, t: f64, out: &mut [f64]) {
        out.iter_mut().zip(&self.body).for_each(|(o, b)| *o = *b);
        if self.body.is_empty() {
            out.iter_mut().for_each(|o| *o = 0.0);
        }
        for (k, e) in &self.edges {
            let tr = &program.tractions[*k];
            let s = tr.history.value(t);
            if s == 0.0 {
                continue;
            }
            let v = match tr.direction {
                TractionDirection::Normal => e.normal * s,
                TractionDirection::Pressure => -e.normal * s,
                TractionDirection::Fixed { x, y } => Vec2::new(x, y) * s,
            };
            let f = v * (0.5 * e.length);
            for &n in &e.nodes {
                out[2 * n] += f.x;
                out[2 * n + 1] += f.y;
            }
        }
    }
}

pub fn assemble_load(mesh: &Mesh, program: &LoadProgram, t: f64) -> Result<Vec<f64>> {
    let b = program.bind(mesh)?;
    let mut f = vec![0.0; mesh.n_dofs()];
    b.assemble(program, t, &mut f);
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    X,
    Y,
}

/// Prescribed displacement on selected boundary nodes or on the node site
/// closest to a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum Constraint {
    Edges {
        region: BoundarySelector,
        component: Component,
        #[serde(default)]
        value: f64,
    },
    Point {
        at: [f64; 2],
        component: Component,
        #[serde(default)]
        value: f64,
    },
}

/// Resolves constraints to `(dof, value)` pairs, sorted by dof.
pub fn bind_constraints(mesh: &Mesh, constraints: &[Constraint]) -> Result<Vec<(usize, f64)>> {
    let edges = mesh.boundary_edges();
    let (lo, hi) = mesh.bounds();
    let mut out: Vec<(usize, f64)> = Vec::new();
    let comp = |c: Component| if c == Component::X { 0 } else { 1 };
    for (k, c) in constraints.iter().enumerate() {
        match c {
            Constraint::Edges {
                region,
                component,
                value,
            } => {
                let sel = region.select(&edges, lo, hi, mesh.avg_element_size);
                if sel.is_empty() {
                    return Err(Error::Binding(format!("constraint {k} matches no boundary edge")));
                }
                for e in sel {
                    for &n in &e.nodes {
                        out.push((2 * n + comp(*component), *value));
                    }
                }
            }
            Constraint::Point { at, component, value } => {
                let p = Vec2::new(at[0], at[1]);
                let best = mesh
                    .nodes
                    .iter()
                    .enumerate()
                    .min_by(|a, b| {
                        (a.1.position - p).norm().total_cmp(&(b.1.position - p).norm())
                    })
                    .ok_or_else(|| Error::Binding("point constraint on an empty mesh".into()))?;
                let site = best.1.site;
                for (n, node) in mesh.nodes.iter().enumerate() {
                    if node.site == site {
                        out.push((2 * n + comp(*component), *value));
                    }
                }
            }
        }
    }
    out.sort_by_key(|a| a.0);
    out.dedup_by(|a, b| a.0 == b.0);
    Ok(out)
}
