//! Small planar geometry helpers shared by the mesh, bond and morphing code.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

pub type Vec2 = Vector2<f64>;

/// 2D cross product (z component).
#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// A closed line segment in the plane, in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        Segment {
            a: [a.x, a.y],
            b: [b.x, b.y],
        }
    }

    pub fn start(&self) -> Vec2 {
        Vec2::new(self.a[0], self.a[1])
    }

    pub fn end(&self) -> Vec2 {
        Vec2::new(self.b[0], self.b[1])
    }

    pub fn length(&self) -> f64 {
        (self.end() - self.start()).norm()
    }

    /// Euclidean distance from `p` to the closest point of the segment.
    pub fn distance_to(&self, p: &Vec2) -> f64 {
        let a = self.start();
        let d = self.end() - a;
        let len2 = d.norm_squared();
        if len2 == 0.0 {
            return (p - a).norm();
        }
        let t = ((p - a).dot(&d) / len2).clamp(0.0, 1.0);
        (p - (a + d * t)).norm()
    }

    /// Proper crossing test between this segment and the open segment `p`–`q`.
    ///
    /// Touching at an endpoint of either segment does not count, neither do
    /// collinear overlaps.
    pub fn crosses(&self, p: &Vec2, q: &Vec2) -> bool {
        let a = self.start();
        let b = self.end();
        let d1 = cross(&(b - a), &(p - a));
        let d2 = cross(&(b - a), &(q - a));
        let d3 = cross(&(q - p), &(a - p));
        let d4 = cross(&(q - p), &(b - p));
        d1 * d2 < 0.0 && d3 * d4 < 0.0
    }
}

/// Uniform bucket grid for fixed radius neighbour queries.
///
/// Items are stored in CSR form (`starts`/`items`), so the grid is immutable
/// once built.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl SpatialGrid {
    pub fn build(points: &[Vec2], cell: f64) -> Self {
        assert!(cell > 0.0, "grid cell size must be positive");
        let (mut lo, mut hi) = (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN));
        for p in points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        if points.is_empty() {
            lo = Vec2::zeros();
            hi = Vec2::zeros();
        }
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).max(1);
        let mut counts = vec![0u32; nx * ny + 1];
        let key = |p: &Vec2| -> usize {
            let i = (((p.x - lo.x) / cell) as usize).min(nx - 1);
            let j = (((p.y - lo.y) / cell) as usize).min(ny - 1);
            j * nx + i
        };
        for p in points {
            counts[key(p) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; points.len()];
        for (idx, p) in points.iter().enumerate() {
            let k = key(p);
            items[fill[k] as usize] = idx as u32;
            fill[k] += 1;
        }
        SpatialGrid {
            origin: lo,
            cell,
            nx,
            ny,
            starts: counts,
            items,
        }
    }

    /// Calls `f` with every stored index whose bucket may intersect the disc
    /// of radius `r` around `x`. Callers filter by exact distance.
    pub fn for_each_candidate(&self, x: &Vec2, r: f64, mut f: impl FnMut(usize)) {
        let cell_range = |v: f64, o: f64, n: usize| -> Option<(usize, usize)> {
            let lo = ((v - r - o) / self.cell).floor();
            let hi = ((v + r - o) / self.cell).floor();
            if hi < 0.0 || lo > (n - 1) as f64 {
                return None;
            }
            Some((lo.max(0.0) as usize, (hi as usize).min(n - 1)))
        };
        let Some((i0, i1)) = cell_range(x.x, self.origin.x, self.nx) else {
            return;
        };
        let Some((j0, j1)) = cell_range(x.y, self.origin.y, self.ny) else {
            return;
        };
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = j * self.nx + i;
                for &idx in &self.items[self.starts[k] as usize..self.starts[k + 1] as usize] {
                    f(idx as usize);
                }
            }
        }
    }

    /// Indices of `points` within distance `r` of `x` (inclusive).
    pub fn within(&self, points: &[Vec2], x: &Vec2, r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let r2 = r * r;
        self.for_each_candidate(x, r, |i| {
            if (points[i] - x).norm_squared() <= r2 {
                out.push(i);
            }
        });
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_excludes_endpoints() {
        let s = Segment::new(Vec2::new(0.0, 0.0), Vec2::new(0.0, 10.0));
        assert!(s.crosses(&Vec2::new(-1.0, 5.0), &Vec2::new(1.0, 5.0)));
        // passes through the slit tip
        assert!(!s.crosses(&Vec2::new(-1.0, 9.0), &Vec2::new(1.0, 11.0)));
        // ends on the slit
        assert!(!s.crosses(&Vec2::new(-1.0, 5.0), &Vec2::new(0.0, 5.0)));
        assert!(!s.crosses(&Vec2::new(-1.0, 12.0), &Vec2::new(1.0, 12.0)));
    }

    #[test]
    fn segment_distance() {
        let s = Segment::new(Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0));
        assert_eq!(s.distance_to(&Vec2::new(5.0, 3.0)), 3.0);
        assert_eq!(s.distance_to(&Vec2::new(13.0, 4.0)), 5.0);
    }

    #[test]
    fn grid_matches_brute_force() {
        let pts: Vec<Vec2> = (0..400)
            .map(|i| Vec2::new((i % 20) as f64 * 0.37, (i / 20) as f64 * 0.41))
            .collect();
        let grid = SpatialGrid::build(&pts, 1.1);
        for q in [Vec2::new(3.0, 4.0), Vec2::new(-2.0, 0.0), Vec2::new(7.0, 7.9)] {
            let mut brute: Vec<usize> = (0..pts.len())
                .filter(|&i| (pts[i] - q).norm() <= 1.5)
                .collect();
            brute.sort_unstable();
            assert_eq!(grid.within(&pts, &q, 1.5), brute);
        }
    }
}
