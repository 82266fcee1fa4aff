//! 2D discretisation with continuous (CE) and discrete (DE) elements.
//!
//! Node and element ids are their indices. CE elements share nodes with
//! their neighbours; DE elements own private copies, so element boundaries
//! inside a DE region can separate. Every node carries a `site`, the label
//! of the geometric location it was created at; duplicates share it.

pub mod generate;
mod io;
pub mod quadrature;
pub mod shape;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cross, Segment, Vec2};
pub use generate::{mirrored_mesh, perforated_mesh, Circle, Outline};
pub use io::{load_unstructured_mesh, parse_mesh};
pub use quadrature::{PdPoints, PdQuadrature};
pub use shape::Shape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub position: Vec2,
    pub site: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub local: [f64; 2],
    pub position: Vec2,
    /// Physical weight, mm².
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub kind: ElementKind,
    pub shape: Shape,
    pub nodes: Vec<usize>,
    /// Gauss points of the continuum term.
    pub quad_points: Vec<QuadPoint>,
    pub centroid: Vec2,
    pub area: f64,
}

impl Element {
    pub fn is_discrete(&self) -> bool {
        self.kind == ElementKind::Discrete
    }
}

/// Old node id to the ids now occupying its site, produced by a conversion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeMap {
    pub pairs: BTreeMap<usize, Vec<usize>>,
}

impl NodeMap {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Ids created by the conversion (excludes ids that were kept).
    pub fn new_ids(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs
            .iter()
            .flat_map(|(&old, ids)| ids.iter().filter(move |&&n| n != old).map(move |&n| (old, n)))
    }
}

/// A free edge of the mesh (an edge whose two sites belong to one element).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub element: usize,
    pub nodes: [usize; 2],
    pub midpoint: Vec2,
    pub length: f64,
    /// Unit outward normal.
    pub normal: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Node>,
    pub elements: Vec<Element>,
    pub slits: Vec<Segment>,
    /// Mean element edge length Δx̄, mm.
    pub avg_element_size: f64,
    /// Shortest element edge L, mm.
    pub min_edge: f64,
}

fn polygon_area_centroid(coords: &[Vec2]) -> (f64, Vec2) {
    let mut a2 = 0.0;
    let mut c = Vec2::zeros();
    for i in 0..coords.len() {
        let p = coords[i];
        let q = coords[(i + 1) % coords.len()];
        let w = cross(&p, &q);
        a2 += w;
        c += (p + q) * w;
    }
    (0.5 * a2, c / (3.0 * a2))
}

impl Mesh {
    /// Builds a mesh of continuous elements from node positions and
    /// connectivity, validating ids and orientation.
    pub fn from_parts(positions: Vec<Vec2>, cells: Vec<(Shape, Vec<usize>)>) -> Result<Mesh> {
        let nodes = positions
            .into_iter()
            .enumerate()
            .map(|(site, position)| Node { position, site })
            .collect::<Vec<_>>();
        let mut elements = Vec::with_capacity(cells.len());
        for (e, (shape, conn)) in cells.into_iter().enumerate() {
            if conn.len() != shape.n_nodes() {
                return Err(Error::geometry(format!(
                    "element {e} has {} nodes, expected {}",
                    conn.len(),
                    shape.n_nodes()
                )));
            }
            if let Some(&bad) = conn.iter().find(|&&n| n >= nodes.len()) {
                return Err(Error::geometry(format!("element {e} references missing node {bad}")));
            }
            elements.push(Self::make_element(&nodes, shape, conn, ElementKind::Continuous, e)?);
        }
        let mut mesh = Mesh {
            nodes,
            elements,
            slits: Vec::new(),
            avg_element_size: 0.0,
            min_edge: 0.0,
        };
        mesh.refresh_sizes();
        Ok(mesh)
    }

    fn make_element(
        nodes: &[Node],
        shape: Shape,
        conn: Vec<usize>,
        kind: ElementKind,
        id: usize,
    ) -> Result<Element> {
        let coords: Vec<Vec2> = conn.iter().map(|&n| nodes[n].position).collect();
        let (area, centroid) = polygon_area_centroid(&coords);
        if !(area > 0.0) {
            return Err(Error::geometry(format!(
                "element {id} is inverted or degenerate (signed area {area:.3e} mm²)"
            )));
        }
        let mut quad_points = Vec::new();
        for (local, w) in shape.gauss_rule() {
            let ev = shape::evaluate(shape, &coords, local);
            if ev.det_j <= 0.0 {
                return Err(Error::geometry(format!("element {id} has a non-positive Jacobian")));
            }
            quad_points.push(QuadPoint {
                local,
                position: ev.position,
                weight: w * ev.det_j,
            });
        }
        Ok(Element {
            kind,
            shape,
            nodes: conn,
            quad_points,
            centroid,
            area,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn element_coords(&self, e: usize) -> Vec<Vec2> {
        self.elements[e].nodes.iter().map(|&n| self.nodes[n].position).collect()
    }

    pub fn total_area(&self) -> f64 {
        self.elements.iter().map(|e| e.area).sum()
    }

    /// Recomputes Δx̄ and L.
    pub fn refresh_sizes(&mut self) {
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut min = f64::INFINITY;
        for el in &self.elements {
            for &(a, b) in el.shape.edges() {
                let len = (self.nodes[el.nodes[a]].position - self.nodes[el.nodes[b]].position).norm();
                sum += len;
                count += 1;
                min = min.min(len);
            }
        }
        self.avg_element_size = if count > 0 { sum / count as f64 } else { 0.0 };
        self.min_edge = if count > 0 { min } else { 0.0 };
    }

    /// Shortest element edge length L.
    pub fn min_edge_length(&self) -> Result<f64> {
        if self.elements.is_empty() {
            return Err(Error::param("min_edge_length of an empty mesh"));
        }
        Ok(self
            .elements
            .iter()
            .flat_map(|el| {
                el.shape.edges().iter().map(move |&(a, b)| {
                    (self.nodes[el.nodes[a]].position - self.nodes[el.nodes[b]].position).norm()
                })
            })
            .fold(f64::INFINITY, f64::min))
    }

    /// Element ids incident to each node.
    pub fn node_elements(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (e, el) in self.elements.iter().enumerate() {
            for &n in &el.nodes {
                adj[n].push(e);
            }
        }
        adj
    }

    /// Number of dofs carried by nodes of discrete elements.
    pub fn discrete_dofs(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| e.is_discrete())
            .map(|e| 2 * e.nodes.len())
            .sum()
    }

    pub fn discrete_area(&self) -> f64 {
        self.elements.iter().filter(|e| e.is_discrete()).map(|e| e.area).sum()
    }

    /// Free boundary edges, identified through sites so that the private
    /// copies of DE nodes do not create artificial interior boundaries.
    pub fn boundary_edges(&self) -> Vec<BoundaryEdge> {
        let mut count: HashMap<(usize, usize), u32> = HashMap::new();
        let key = |a: usize, b: usize| {
            let (sa, sb) = (self.nodes[a].site, self.nodes[b].site);
            (sa.min(sb), sa.max(sb))
        };
        for el in &self.elements {
            for &(a, b) in el.shape.edges() {
                *count.entry(key(el.nodes[a], el.nodes[b])).or_default() += 1;
            }
        }
        let mut out = Vec::new();
        for (e, el) in self.elements.iter().enumerate() {
            for &(a, b) in el.shape.edges() {
                let (na, nb) = (el.nodes[a], el.nodes[b]);
                if count[&key(na, nb)] != 1 {
                    continue;
                }
                let pa = self.nodes[na].position;
                let pb = self.nodes[nb].position;
                let d = pb - pa;
                let length = d.norm();
                out.push(BoundaryEdge {
                    element: e,
                    nodes: [na, nb],
                    midpoint: (pa + pb) * 0.5,
                    length,
                    normal: Vec2::new(d.y, -d.x) / length,
                });
            }
        }
        out
    }

    /// Bounding box `(min, max)` of the node positions.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::MAX, f64::MAX);
        let mut hi = Vec2::new(f64::MIN, f64::MIN);
        for n in &self.nodes {
            lo = lo.inf(&n.position);
            hi = hi.sup(&n.position);
        }
        (lo, hi)
    }

    /// Cuts a slit along `segment`: nodes on it are split so the two faces are
    /// disconnected, and the segment is stored for bond blocking.
    ///
    /// The segment must run along element edges. Segment endpoints inside the
    /// body stay shared (the slit tip); endpoints on the outer boundary are
    /// split too. Returns the number of nodes added.
    pub fn insert_pre_notch(&mut self, segment: Segment) -> Result<usize> {
        let a = segment.start();
        let b = segment.end();
        let len = segment.length();
        if len == 0.0 {
            return Ok(0);
        }
        let tol = 1e-9 * self.avg_element_size.max(1e-300);
        let dir = (b - a) / len;
        // nodes lying on the segment, by parameter along it
        let mut on_seg: Vec<(f64, usize)> = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| {
                let p = n.position - a;
                let t = p.dot(&dir);
                let off = cross(&dir, &p).abs();
                (off <= tol && t >= -tol && t <= len + tol).then_some((t, i))
            })
            .collect();
        if on_seg.is_empty() {
            return Err(Error::geometry("pre-notch segment does not touch the mesh"));
        }
        on_seg.sort_by(|x, y| x.0.total_cmp(&y.0));
        if on_seg[0].0 > tol || on_seg.last().unwrap().0 < len - tol {
            return Err(Error::geometry(
                "pre-notch endpoints must coincide with mesh nodes",
            ));
        }
        // consecutive nodes along the segment must be joined by element edges
        let mut edge_set = std::collections::HashSet::new();
        for el in &self.elements {
            for &(p, q) in el.shape.edges() {
                let (np, nq) = (el.nodes[p], el.nodes[q]);
                edge_set.insert((np.min(nq), np.max(nq)));
            }
        }
        let distinct: Vec<(f64, usize)> = {
            let mut v: Vec<(f64, usize)> = Vec::new();
            for &(t, n) in &on_seg {
                // skip already-split duplicates sitting at the same parameter
                if v.last().is_some_and(|&(tp, _)| (t - tp).abs() <= tol) {
                    continue;
                }
                v.push((t, n));
            }
            v
        };
        for w in distinct.windows(2) {
            let (p, q) = (w[0].1, w[1].1);
            if !edge_set.contains(&(p.min(q), p.max(q))) {
                return Err(Error::geometry(format!(
                    "pre-notch between t = {:.3} and t = {:.3} mm does not follow element edges",
                    w[0].0, w[1].0
                )));
            }
        }
        let boundary_sites: std::collections::HashSet<usize> = self
            .boundary_edges()
            .iter()
            .flat_map(|e| e.nodes.iter().map(|&n| self.nodes[n].site).collect::<Vec<_>>())
            .collect();
        let adj = self.node_elements();
        let mut added = 0;
        let last = distinct.len() - 1;
        for (k, &(_, n)) in distinct.iter().enumerate() {
            let is_end = k == 0 || k == last;
            if is_end && !boundary_sites.contains(&self.nodes[n].site) {
                continue;
            }
            // elements on the left of the directed segment get the copy
            let left: Vec<usize> = adj[n]
                .iter()
                .copied()
                .filter(|&e| cross(&dir, &(self.elements[e].centroid - a)) > 0.0)
                .collect();
            let right_exists = adj[n]
                .iter()
                .any(|&e| cross(&dir, &(self.elements[e].centroid - a)) < 0.0);
            if left.is_empty() || !right_exists {
                continue;
            }
            let copy = self.nodes.len();
            self.nodes.push(self.nodes[n].clone());
            for e in left {
                for slot in self.elements[e].nodes.iter_mut() {
                    if *slot == n {
                        *slot = copy;
                    }
                }
            }
            added += 1;
        }
        self.slits.push(segment);
        self.refresh_sizes();
        Ok(added)
    }

    /// Turns the listed CE elements into DE elements with private nodes.
    ///
    /// A node shared with any other element is copied (same position and
    /// site); a node used only by the converted element is kept. Elements
    /// that are already DE are skipped. Ids are processed in ascending
    /// order so node numbering is deterministic.
    pub fn convert_to_discrete(&mut self, element_ids: &[usize]) -> NodeMap {
        let mut ids: Vec<usize> = element_ids
            .iter()
            .copied()
            .filter(|&e| e < self.elements.len() && !self.elements[e].is_discrete())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        let mut map = NodeMap::default();
        if ids.is_empty() {
            return map;
        }
        let mut use_count = vec![0u32; self.nodes.len()];
        for el in &self.elements {
            for &n in &el.nodes {
                use_count[n] += 1;
            }
        }
        for e in ids {
            for k in 0..self.elements[e].nodes.len() {
                let old = self.elements[e].nodes[k];
                let entry = map.pairs.entry(old).or_default();
                if use_count[old] > 1 {
                    use_count[old] -= 1;
                    let copy = self.nodes.len();
                    self.nodes.push(self.nodes[old].clone());
                    use_count.push(1);
                    self.elements[e].nodes[k] = copy;
                    entry.push(copy);
                } else {
                    entry.push(old);
                }
            }
            self.elements[e].kind = ElementKind::Discrete;
        }
        // record remaining holders of each old node too
        for (&old, ids) in map.pairs.iter_mut() {
            if use_count[old] > 0 && !ids.contains(&old) {
                ids.insert(0, old);
            }
        }
        self.refresh_sizes();
        map
    }
}

/// Axis-aligned structured grid of bilinear quads, all CE.
pub fn generate_structured_quad_mesh(lo: Vec2, hi: Vec2, spacing: f64) -> Result<Mesh> {
    if !(spacing > 0.0) {
        return Err(Error::param(format!("mesh spacing must be positive, got {spacing}")));
    }
    let size = hi - lo;
    if !(size.x > 0.0 && size.y > 0.0) {
        return Err(Error::param("structured mesh rectangle must have positive area"));
    }
    let nx = ((size.x / spacing).round() as usize).max(1);
    let ny = ((size.y / spacing).round() as usize).max(1);
    let (hx, hy) = (size.x / nx as f64, size.y / ny as f64);
    let mut positions = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            positions.push(Vec2::new(lo.x + i as f64 * hx, lo.y + j as f64 * hy));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            cells.push((
                Shape::Quad4,
                vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)],
            ));
        }
    }
    Mesh::from_parts(positions, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_quads() -> Mesh {
        generate_structured_quad_mesh(Vec2::new(0.0, 0.0), Vec2::new(2.0, 1.0), 1.0).unwrap()
    }

    fn two_triangles() -> Mesh {
        Mesh::from_parts(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
            ],
            vec![(Shape::Tri3, vec![0, 1, 2]), (Shape::Tri3, vec![0, 2, 3])],
        )
        .unwrap()
    }

    #[test]
    fn structured_counts() {
        let m = generate_structured_quad_mesh(Vec2::zeros(), Vec2::new(10.0, 10.0), 1.0).unwrap();
        assert_eq!((m.elements.len(), m.nodes.len()), (100, 121));
        assert_eq!(m.avg_element_size, 1.0);
        let m = generate_structured_quad_mesh(Vec2::zeros(), Vec2::new(1.0, 1.0), 1.0).unwrap();
        assert_eq!((m.elements.len(), m.nodes.len()), (1, 4));
        let m = generate_structured_quad_mesh(Vec2::zeros(), Vec2::new(100.0, 100.0), 0.5).unwrap();
        assert_eq!(m.elements.len(), 40_000);
        assert!(m.elements.iter().all(|e| e.kind == ElementKind::Continuous));
    }

    #[test]
    fn structured_rejects_bad_spacing() {
        assert!(matches!(
            generate_structured_quad_mesh(Vec2::zeros(), Vec2::new(1.0, 1.0), 0.0),
            Err(Error::Parameter(_))
        ));
        assert!(generate_structured_quad_mesh(Vec2::zeros(), Vec2::new(1.0, 1.0), -1.0).is_err());
    }

    #[test]
    fn quadrature_weights_sum_to_area() {
        let m = Mesh::from_parts(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(2.0, 0.1),
                Vec2::new(2.2, 1.9),
                Vec2::new(0.3, 1.4),
                Vec2::new(3.0, 1.0),
            ],
            vec![(Shape::Quad4, vec![0, 1, 2, 3]), (Shape::Tri3, vec![1, 4, 2])],
        )
        .unwrap();
        for el in &m.elements {
            let s: f64 = el.quad_points.iter().map(|q| q.weight).sum();
            assert!((s - el.area).abs() < 1e-12 * el.area);
        }
    }

    #[test]
    fn inverted_element_rejected() {
        let r = Mesh::from_parts(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            vec![(Shape::Tri3, vec![0, 2, 1])],
        );
        assert!(matches!(r, Err(Error::Geometry(_))));
    }

    #[test]
    fn convert_two_quads() {
        let mut m = two_quads();
        assert_eq!(m.nodes.len(), 6);
        let map = m.convert_to_discrete(&[0, 1]);
        assert_eq!(m.nodes.len(), 8);
        // the two shared sites (nodes 1 and 4) now have two ids each
        assert_eq!(map.pairs[&1].len(), 2);
        assert_eq!(map.pairs[&4].len(), 2);
        assert!(m.elements.iter().all(|e| e.is_discrete()));
        let a: Vec<usize> = m.elements[0].nodes.clone();
        assert!(a.iter().all(|n| !m.elements[1].nodes.contains(n)));
    }

    #[test]
    fn convert_empty_and_idempotent() {
        let mut m = two_quads();
        let before = m.clone();
        assert!(m.convert_to_discrete(&[]).is_empty());
        assert_eq!(m, before);
        m.convert_to_discrete(&[1]);
        let once = m.clone();
        assert!(m.convert_to_discrete(&[1]).is_empty());
        assert_eq!(m, once);
    }

    #[test]
    fn convert_one_triangle() {
        // hand enumeration: triangle 1 = (0, 2, 3) shares nodes 0 and 2 with
        // triangle 0, node 3 is its own. Converting it copies 0 and 2 to new
        // ids 4 and 5 and keeps 3.
        let mut m = two_triangles();
        let map = m.convert_to_discrete(&[1]);
        assert_eq!(m.elements[1].nodes, vec![4, 5, 3]);
        assert_eq!(m.elements[0].nodes, vec![0, 1, 2]);
        assert_eq!(map.pairs[&0], vec![0, 4]);
        assert_eq!(map.pairs[&2], vec![2, 5]);
        assert_eq!(map.pairs[&3], vec![3]);
        assert_eq!(m.nodes[4].position, m.nodes[0].position);
        assert_eq!(m.nodes[4].site, m.nodes[0].site);
    }

    #[test]
    fn conversion_preserves_geometry() {
        let mut m = generate_structured_quad_mesh(Vec2::zeros(), Vec2::new(4.0, 3.0), 1.0).unwrap();
        let before: Vec<(f64, Vec<QuadPoint>)> =
            m.elements.iter().map(|e| (e.area, e.quad_points.clone())).collect();
        m.convert_to_discrete(&[0, 5, 6, 7]);
        for (el, (area, qp)) in m.elements.iter().zip(before) {
            assert_eq!(el.area, area);
            assert_eq!(el.quad_points, qp);
        }
        for n in &m.nodes {
            assert_eq!(n.position, m.nodes[n.site].position);
        }
    }

    #[test]
    fn min_edge_cases() {
        let m = generate_structured_quad_mesh(Vec2::zeros(), Vec2::new(5.0, 5.0), 0.5).unwrap();
        assert_eq!(m.min_edge_length().unwrap(), 0.5);
        let t = Mesh::from_parts(
            vec![Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0), Vec2::new(0.0, 3.0)],
            vec![(Shape::Tri3, vec![0, 1, 2])],
        )
        .unwrap();
        assert_eq!(t.min_edge_length().unwrap(), 3.0);
        let mixed = Mesh::from_parts(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
                Vec2::new(1.2, 0.5),
            ],
            vec![(Shape::Quad4, vec![0, 1, 2, 3]), (Shape::Tri3, vec![1, 4, 2])],
        )
        .unwrap();
        assert!((mixed.min_edge_length().unwrap() - (0.2f64.powi(2) + 0.25).sqrt()).abs() < 1e-15);
        let empty = Mesh::from_parts(vec![], vec![]).unwrap();
        assert!(matches!(empty.min_edge_length(), Err(Error::Parameter(_))));
    }

    #[test]
    fn notch_from_bottom() {
        let mut m = generate_structured_quad_mesh(Vec2::zeros(), Vec2::new(10.0, 10.0), 1.0).unwrap();
        let n0 = m.nodes.len();
        let added = m
            .insert_pre_notch(Segment::new(Vec2::new(5.0, 0.0), Vec2::new(5.0, 5.0)))
            .unwrap();
        // interior nodes y = 1..4 plus the boundary endpoint at y = 0
        assert_eq!(added, 5);
        assert_eq!(m.nodes.len(), n0 + 5);
        assert_eq!(m.slits.len(), 1);
        // the faces are now free boundary edges
        let faces = m
            .boundary_edges()
            .iter()
            .filter(|e| (e.midpoint.x - 5.0).abs() < 1e-12)
            .count();
        assert_eq!(faces, 0, "slit faces share sites, they are not loadable boundary");
        let left = m.elements[4].nodes.clone(); // element (4,0) left of x = 5
        let right = m.elements[5].nodes.clone();
        assert!(left.iter().all(|n| !right.contains(n)));
    }

    #[test]
    fn notch_degenerate_cases() {
        let mut m = generate_structured_quad_mesh(Vec2::zeros(), Vec2::new(4.0, 4.0), 1.0).unwrap();
        let before = m.clone();
        assert_eq!(m.insert_pre_notch(Segment::new(Vec2::new(2.0, 0.0), Vec2::new(2.0, 0.0))).unwrap(), 0);
        assert_eq!(m, before);
        assert!(matches!(
            m.insert_pre_notch(Segment::new(Vec2::new(20.0, 0.0), Vec2::new(20.0, 3.0))),
            Err(Error::Geometry(_))
        ));
        assert!(m
            .insert_pre_notch(Segment::new(Vec2::new(2.5, 0.0), Vec2::new(2.5, 2.0)))
            .is_err());
    }

    #[test]
    fn boundary_of_grid() {
        let m = generate_structured_quad_mesh(Vec2::zeros(), Vec2::new(3.0, 2.0), 1.0).unwrap();
        let b = m.boundary_edges();
        assert_eq!(b.len(), 10);
        let perimeter: f64 = b.iter().map(|e| e.length).sum();
        assert!((perimeter - 10.0).abs() < 1e-12);
        for e in &b {
            // outward normals point away from the centre
            assert!((e.midpoint - Vec2::new(1.5, 1.0)).dot(&e.normal) > 0.0);
        }
    }
}
