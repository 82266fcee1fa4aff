//! Triangle meshes of rectangles and disks with circular holes.
//!
//! Nodes are boundary samples at spacing `h` plus a hexagonal lattice kept
//! clear of every boundary; the constrained Delaunay triangulation of the
//! set is trimmed to the domain.

use serde::{Deserialize, Serialize};
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::{Mesh, Shape};
use crate::error::{Error, Result};
use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Circle {
    pub fn c(&self) -> Vec2 {
        Vec2::new(self.center[0], self.center[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outline {
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
}

impl Outline {
    fn contains(&self, p: &Vec2) -> bool {
        match *self {
            Outline::Rectangle { lo, hi } => p.x >= lo[0] && p.x <= hi[0] && p.y >= lo[1] && p.y <= hi[1],
            Outline::Disk { center, radius } => (p - Vec2::new(center[0], center[1])).norm() <= radius,
        }
    }

    /// Distance to the outline from an interior point.
    fn clearance(&self, p: &Vec2) -> f64 {
        match *self {
            Outline::Rectangle { lo, hi } => (p.x - lo[0]).min(hi[0] - p.x).min(p.y - lo[1]).min(hi[1] - p.y),
            Outline::Disk { center, radius } => radius - (p - Vec2::new(center[0], center[1])).norm(),
        }
    }

    fn samples(&self, h: f64) -> Vec<Vec2> {
        match *self {
            Outline::Rectangle { lo, hi } => {
                let (lo, hi) = (Vec2::new(lo[0], lo[1]), Vec2::new(hi[0], hi[1]));
                let corners = [lo, Vec2::new(hi.x, lo.y), hi, Vec2::new(lo.x, hi.y)];
                let mut out = Vec::new();
                for k in 0..4 {
                    let (a, b) = (corners[k], corners[(k + 1) % 4]);
                    let n = (((b - a).norm() / h).round() as usize).max(1);
                    out.extend((0..n).map(|i| a + (b - a) * (i as f64 / n as f64)));
                }
                out
            }
            Outline::Disk { center, radius } => ring(Vec2::new(center[0], center[1]), radius, h),
        }
    }
}

fn ring(c: Vec2, r: f64, h: f64) -> Vec<Vec2> {
    let n = ((2.0 * std::f64::consts::PI * r / h).ceil() as usize).max(6);
    (0..n)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            c + Vec2::new(a.cos(), a.sin()) * r
        })
        .collect()
}

/// Meshes `outline` minus `holes` with nominal edge length `h`.
pub fn perforated_mesh(outline: &Outline, holes: &[Circle], h: f64) -> Result<Mesh> {
    let (positions, tris) = triangulate(outline, holes, h)?;
    Mesh::from_parts(positions, tris.into_iter().map(|t| (Shape::Tri3, t.to_vec())).collect())
}

/// Mirror-symmetric mesh of a rectangle about the vertical line `x = x0`.
///
/// The half `x ≤ x0` is meshed and reflected; nodes on the line are shared,
/// so the line is a chain of element edges. `x0` must be the rectangle's
/// mid-line and the hole set must be symmetric about it.
pub fn mirrored_mesh(outline: &Outline, holes: &[Circle], h: f64, x0: f64) -> Result<Mesh> {
    let Outline::Rectangle { lo, hi } = *outline else {
        return Err(Error::geometry("mirrored meshes need a rectangular outline"));
    };
    if ((lo[0] + hi[0]) / 2.0 - x0).abs() > 1e-9 * (hi[0] - lo[0]) {
        return Err(Error::geometry(format!("mirror line x = {x0} is not the mid-line of the rectangle")));
    }
    let tol = 1e-9 * (hi[0] - lo[0]);
    let reflect = |c: &Circle| Circle {
        center: [2.0 * x0 - c.center[0], c.center[1]],
        radius: c.radius,
    };
    let left: Vec<Circle> = holes.iter().filter(|c| c.center[0] < x0).copied().collect();
    let symmetric = holes.len() == 2 * left.len()
        && left.iter().all(|c| {
            let m = reflect(c);
            holes
                .iter()
                .any(|d| (d.c() - m.c()).norm() < tol && (d.radius - m.radius).abs() < tol)
        });
    if !symmetric {
        return Err(Error::geometry(format!("holes are not symmetric about x = {x0}")));
    }
    let half = Outline::Rectangle { lo, hi: [x0, hi[1]] };
    let (mut positions, mut tris) = triangulate(&half, &left, h)?;
    let n = positions.len();
    let mut image = vec![usize::MAX; n];
    for i in 0..n {
        let p = positions[i];
        image[i] = if (p.x - x0).abs() < tol {
            i
        } else {
            positions.push(Vec2::new(2.0 * x0 - p.x, p.y));
            positions.len() - 1
        };
    }
    let mirrored: Vec<[usize; 3]> = tris.iter().map(|t| [image[t[0]], image[t[2]], image[t[1]]]).collect();
    tris.extend(mirrored);
    Mesh::from_parts(positions, tris.into_iter().map(|t| (Shape::Tri3, t.to_vec())).collect())
}

/// Counter-clockwise triangles of `outline` minus `holes`.
fn triangulate(outline: &Outline, holes: &[Circle], h: f64) -> Result<(Vec<Vec2>, Vec<[usize; 3]>)> {
    if !(h > 0.0) {
        return Err(Error::param(format!("mesh spacing must be positive, got {h}")));
    }
    for (k, c) in holes.iter().enumerate() {
        if !(c.radius > 0.0) || outline.clearance(&c.c()) < c.radius + 0.5 * h {
            return Err(Error::geometry(format!("hole {k} is not inside the outline with clearance h/2")));
        }
        for (m, d) in holes.iter().enumerate().skip(k + 1) {
            if (c.c() - d.c()).norm() < c.radius + d.radius + 0.5 * h {
                return Err(Error::geometry(format!("holes {k} and {m} overlap or touch")));
            }
        }
    }
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    let insert = |cdt: &mut ConstrainedDelaunayTriangulation<Point2<f64>>, p: Vec2| {
        cdt.insert(Point2::new(p.x, p.y))
            .map_err(|e| Error::geometry(format!("triangulation rejected point {p:?}: {e:?}")))
    };
    let mut loops = vec![outline.samples(h)];
    loops.extend(holes.iter().map(|c| ring(c.c(), c.radius, h)));
    for lp in &loops {
        let ids = lp.iter().map(|p| insert(&mut cdt, *p)).collect::<Result<Vec<_>>>()?;
        for k in 0..ids.len() {
            cdt.add_constraint(ids[k], ids[(k + 1) % ids.len()]);
        }
    }
    let (lo, hi) = match *outline {
        Outline::Rectangle { lo, hi } => (Vec2::new(lo[0], lo[1]), Vec2::new(hi[0], hi[1])),
        Outline::Disk { center, radius } => (
            Vec2::new(center[0] - radius, center[1] - radius),
            Vec2::new(center[0] + radius, center[1] + radius),
        ),
    };
    let dy = h * 3f64.sqrt() / 2.0;
    let clear = 0.6 * h;
    let ny = ((hi.y - lo.y) / dy).ceil() as usize;
    let nx = ((hi.x - lo.x) / h).ceil() as usize + 1;
    for j in 0..=ny {
        let shift = if j % 2 == 1 { 0.5 * h } else { 0.0 };
        for i in 0..=nx {
            let p = Vec2::new(lo.x + shift + i as f64 * h, lo.y + j as f64 * dy);
            if !outline.contains(&p) || outline.clearance(&p) < clear {
                continue;
            }
            if holes.iter().any(|c| (p - c.c()).norm() < c.radius + clear) {
                continue;
            }
            insert(&mut cdt, p)?;
        }
    }
    let mut positions: Vec<Vec2> = cdt.vertices().map(|v| Vec2::new(v.position().x, v.position().y)).collect();
    let mut used = vec![false; positions.len()];
    let mut tris = Vec::new();
    for f in cdt.inner_faces() {
        let v = f.vertices();
        let ids = [v[0].fix().index(), v[1].fix().index(), v[2].fix().index()];
        let c = (positions[ids[0]] + positions[ids[1]] + positions[ids[2]]) / 3.0;
        if !outline.contains(&c) || holes.iter().any(|hc| (c - hc.c()).norm() < hc.radius) {
            continue;
        }
        for &i in &ids {
            used[i] = true;
        }
        tris.push(ids);
    }
    // drop unused vertices and renumber
    let mut new_id = vec![usize::MAX; positions.len()];
    let mut kept = Vec::new();
    for (i, p) in positions.drain(..).enumerate() {
        if used[i] {
            new_id[i] = kept.len();
            kept.push(p);
        }
    }
    let tris = tris
        .into_iter()
        .map(|t| {
            let mut n = t.map(|i| new_id[i]);
            let (a, b, c) = (kept[n[0]], kept[n[1]], kept[n[2]]);
            if crate::geometry::cross(&(b - a), &(c - a)) < 0.0 {
                n.swap(1, 2);
            }
            n
        })
        .collect();
    Ok((kept, tris))
}
