//! Crack tips from the element damage field, and tip speeds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geometry::{SpatialGrid, Vec2};
use crate::mesh::{Circle, Mesh};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tip {
    /// Connected damaged component the tip belongs to.
    pub component: usize,
    pub element: usize,
    pub position: Vec2,
    /// Path length from the component's seed, mm.
    pub distance: f64,
}

/// Element adjacency through shared node sites.
pub fn element_neighbours(mesh: &Mesh) -> Vec<Vec<usize>> {
    let n_sites = mesh.nodes.iter().map(|n| n.site + 1).max().unwrap_or(0);
    let mut by_site = vec![Vec::new(); n_sites];
    for (e, el) in mesh.elements.iter().enumerate() {
        for &n in &el.nodes {
            by_site[mesh.nodes[n].site].push(e);
        }
    }
    let mut out = vec![Vec::new(); mesh.elements.len()];
    for list in &by_site {
        for &a in list {
            out[a].extend(list.iter().copied().filter(|&b| b != a));
        }
    }
    for v in &mut out {
        v.sort_unstable();
        v.dedup();
    }
    out
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Tips of every damaged component.
///
/// Elements with `φ ≥ threshold` form components through shared sites.
/// Each component is rooted at its element nearest to a seed (or, with no
/// seeds, at one end of its longest path); path lengths follow centroid
/// hops. A tip is an element whose path length beats every other component
/// element within `r_tip` and is at least `r_tip` from the root.
pub fn extract_crack_tips(
    phi: &[f64],
    mesh: &Mesh,
    threshold: f64,
    seeds: &[Vec2],
    r_tip: f64,
) -> Vec<Tip> {
    let nbr = element_neighbours(mesh);
    extract_with(phi, mesh, &nbr, threshold, seeds, r_tip)
}

/// As [`extract_crack_tips`] with a precomputed adjacency.
pub fn extract_with(
    phi: &[f64],
    mesh: &Mesh,
    nbr: &[Vec<usize>],
    threshold: f64,
    seeds: &[Vec2],
    r_tip: f64,
) -> Vec<Tip> {
    let n = mesh.elements.len();
    let damaged: Vec<bool> = phi.iter().map(|&p| p >= threshold).collect();
    let mut comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if !damaged[s] || comp[s] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut k = 0;
        while k < members.len() {
            let e = members[k];
            k += 1;
            for &f in &nbr[e] {
                if damaged[f] && comp[f] == usize::MAX {
                    comp[f] = id;
                    members.push(f);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    let centroid = |e: usize| mesh.elements[e].centroid;
    let mut dist = vec![f64::INFINITY; n];
    let dijkstra = |root: usize, dist: &mut Vec<f64>, members: &[usize]| {
        for &m in members {
            dist[m] = f64::INFINITY;
        }
        dist[root] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Item(0.0, root));
        while let Some(Item(d, e)) = heap.pop() {
            if d > dist[e] {
                continue;
            }
            for &f in &nbr[e] {
                if !damaged[f] {
                    continue;
                }
                let nd = d + (centroid(f) - centroid(e)).norm();
                if nd < dist[f] {
                    dist[f] = nd;
                    heap.push(Item(nd, f));
                }
            }
        }
    };
    let farthest = |dist: &[f64], members: &[usize]| {
        *members
            .iter()
            .max_by(|&&a, &&b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)))
            .expect("non-empty component")
    };
    let mut tips = Vec::new();
    for (id, members) in comps.iter().enumerate() {
        let root = if seeds.is_empty() {
            dijkstra(members[0], &mut dist, members);
            farthest(&dist, members)
        } else {
            *members
                .iter()
                .min_by(|&&a, &&b| {
                    let da = seeds.iter().map(|s| (centroid(a) - s).norm()).fold(f64::INFINITY, f64::min);
                    let db = seeds.iter().map(|s| (centroid(b) - s).norm()).fold(f64::INFINITY, f64::min);
                    da.total_cmp(&db).then(a.cmp(&b))
                })
                .expect("non-empty component")
        };
        dijkstra(root, &mut dist, members);
        let pos: Vec<Vec2> = members.iter().map(|&e| centroid(e)).collect();
        let grid = SpatialGrid::build(&pos, r_tip.max(1e-9));
        for (k, &e) in members.iter().enumerate() {
            if dist[e] < r_tip || !dist[e].is_finite() {
                continue;
            }
            let mut best = true;
            grid.for_each_candidate(&pos[k], r_tip, |j| {
                let f = members[j];
                if f != e
                    && (pos[j] - pos[k]).norm() <= r_tip
                    && (dist[f] > dist[e] || (dist[f] == dist[e] && f < e))
                {
                    best = false;
                }
            });
            if best {
                tips.push(Tip {
                    component: id,
                    element: e,
                    position: pos[k],
                    distance: dist[e],
                });
            }
        }
    }
    tips
}

/// Pores joined by a damaged path running from the left to the right edge
/// of the box `lo..hi`, or `None` without such a path.
///
/// Damaged elements (`φ ≥ threshold`) connect through shared sites; a pore
/// joins every damaged element with a centroid within `tol` of its rim, and
/// an edge every damaged element within `tol` of it.
pub fn through_crack(
    phi: &[f64],
    mesh: &Mesh,
    threshold: f64,
    holes: &[Circle],
    lo: Vec2,
    hi: Vec2,
    tol: f64,
) -> Option<Vec<usize>> {
    let nbr = element_neighbours(mesh);
    let n = mesh.elements.len();
    // graph nodes: elements, then pores, then the left and right edges
    let (left, right) = (n + holes.len(), n + holes.len() + 1);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + holes.len() + 2];
    for e in (0..n).filter(|&e| phi[e] >= threshold) {
        let c = mesh.elements[e].centroid;
        adj[e].extend(nbr[e].iter().copied().filter(|&f| phi[f] >= threshold));
        let link = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
            adj[a].push(b);
            adj[b].push(a);
        };
        for (k, h) in holes.iter().enumerate() {
            if (c - h.c()).norm() - h.radius <= tol {
                link(e, n + k, &mut adj);
            }
        }
        if c.x - lo.x <= tol {
            link(e, left, &mut adj);
        }
        if hi.x - c.x <= tol {
            link(e, right, &mut adj);
        }
    }
    let mut prev = vec![usize::MAX; adj.len()];
    prev[left] = left;
    let mut queue = std::collections::VecDeque::from([left]);
    while let Some(a) = queue.pop_front() {
        if a == right {
            break;
        }
        for &b in &adj[a] {
            if prev[b] == usize::MAX {
                prev[b] = a;
                queue.push_back(b);
            }
        }
    }
    if prev[right] == usize::MAX {
        return None;
    }
    let mut pores = Vec::new();
    let mut a = right;
    while a != left {
        if (n..n + holes.len()).contains(&a) {
            pores.push(a - n);
        }
        a = prev[a];
    }
    pores.reverse();
    Some(pores)
}

/// One tip sample of a crack series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipSample {
    pub step: usize,
    pub t: f64,
    pub tip_id: usize,
    pub position: Vec2,
    /// Smoothed speed, mm/s; `None` until the tip has a predecessor.
    pub speed: Option<f64>,
}

/// Links tips across output samples and computes speeds.
///
/// A tip continues the track of the nearest tip of the previous sample
/// within `link_radius`; otherwise it starts a new track. Raw speeds are
/// the displacement from the linked tip over the sample interval, then
/// averaged over a centred window of three samples on the same track.
pub fn crack_speed(samples: &[(usize, f64, Vec<Vec2>)], link_radius: f64) -> Vec<TipSample> {
    let mut out: Vec<TipSample> = Vec::new();
    let mut raw: Vec<Option<f64>> = Vec::new();
    // previous sample: (track id, position, index in out)
    let mut prev: Vec<(usize, Vec2, usize)> = Vec::new();
    let mut prev_t = 0.0;
    let mut next_id = 0;
    for (step, t, tips) in samples {
        let mut cur = Vec::with_capacity(tips.len());
        let mut taken = vec![false; prev.len()];
        for p in tips {
            let best = prev
                .iter()
                .enumerate()
                .filter(|(k, q)| !taken[*k] && (q.1 - p).norm() <= link_radius)
                .min_by(|a, b| (a.1 .1 - p).norm().total_cmp(&(b.1 .1 - p).norm()));
            let (id, speed, from) = match best {
                Some((k, q)) => {
                    taken[k] = true;
                    let dt = t - prev_t;
                    (q.0, (dt > 0.0).then(|| (p - q.1).norm() / dt), Some(q.2))
                }
                None => {
                    next_id += 1;
                    (next_id - 1, None, None)
                }
            };
            let _ = from;
            cur.push((id, *p, out.len()));
            out.push(TipSample {
                step: *step,
                t: *t,
                tip_id: id,
                position: *p,
                speed: None,
            });
            raw.push(speed);
        }
        prev = cur;
        prev_t = *t;
    }
    // centred three-sample mean along each track
    let mut by_track: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (k, s) in out.iter().enumerate() {
        by_track.entry(s.tip_id).or_default().push(k);
    }
    for idx in by_track.values() {
        for (j, &k) in idx.iter().enumerate() {
            if raw[k].is_none() {
                continue;
            }
            let lo = j.saturating_sub(1);
            let hi = (j + 1).min(idx.len() - 1);
            let vals: Vec<f64> = idx[lo..=hi].iter().filter_map(|&m| raw[m]).collect();
            out[k].speed = Some(vals.iter().sum::<f64>() / vals.len() as f64);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_structured_quad_mesh;

    fn grid() -> Mesh {
        generate_structured_quad_mesh(Vec2::zeros(), Vec2::new(30.0, 30.0), 1.0).unwrap()
    }

    fn mark(m: &Mesh, f: impl Fn(Vec2) -> bool) -> Vec<f64> {
        m.elements.iter().map(|e| if f(e.centroid) { 0.5 } else { 0.0 }).collect()
    }

    #[test]
    fn no_damage_no_tips() {
        let m = grid();
        let phi = vec![0.0; m.elements.len()];
        assert!(extract_crack_tips(&phi, &m, 0.35, &[Vec2::new(15.0, 0.0)], 3.0).is_empty());
    }

    #[test]
    fn straight_band_one_tip() {
        let m = grid();
        let phi = mark(&m, |c| (c.x - 15.0).abs() < 1.0 && c.y < 20.0);
        let tips = extract_crack_tips(&phi, &m, 0.35, &[Vec2::new(15.0, 0.0)], 3.0);
        assert_eq!(tips.len(), 1);
        assert!((tips[0].position.y - 19.5).abs() < 1e-12);
    }

    #[test]
    fn y_shape_two_tips() {
        let m = grid();
        let phi = mark(&m, |c| {
            let stem = (c.x - 15.0).abs() < 1.0 && c.y < 12.0;
            let d = c.y - 12.0;
            let arm = (-0.5..12.0).contains(&d) && ((c.x - 15.0).abs() - d).abs() < 1.0;
            stem || arm
        });
        let tips = extract_crack_tips(&phi, &m, 0.35, &[Vec2::new(15.0, 0.0)], 3.0);
        assert_eq!(tips.len(), 2, "{tips:?}");
        assert!(tips.iter().any(|t| t.position.x < 6.0) && tips.iter().any(|t| t.position.x > 24.0));
    }

    #[test]
    fn unseeded_band_has_tip_at_an_end() {
        let m = grid();
        let phi = mark(&m, |c| (c.y - 15.0).abs() < 0.6 && c.x > 5.0 && c.x < 25.0);
        let tips = extract_crack_tips(&phi, &m, 0.35, &[], 3.0);
        assert_eq!(tips.len(), 1);
        assert!((tips[0].position.x - 5.5).abs() < 1e-12 || (tips[0].position.x - 24.5).abs() < 1e-12);
    }

    #[test]
    fn through_crack_via_a_pore() {
        let m = grid();
        let hole = Circle {
            center: [15.0, 15.0],
            radius: 3.0,
        };
        let (lo, hi) = (Vec2::zeros(), Vec2::new(30.0, 30.0));
        // band from the left edge to the rim, and from the rim to the right edge
        let phi = mark(&m, |c| {
            (c.y - 15.5).abs() < 0.6 && ((c.x < 12.0) || (c.x > 18.0))
        });
        assert_eq!(through_crack(&phi, &m, 0.35, &[hole], lo, hi, 1.0), Some(vec![0]));
        assert_eq!(through_crack(&phi, &m, 0.35, &[], lo, hi, 1.0), None);
        let half = mark(&m, |c| (c.y - 15.5).abs() < 0.6 && c.x < 12.0);
        assert_eq!(through_crack(&half, &m, 0.35, &[hole], lo, hi, 1.0), None);
        let straight = mark(&m, |c| (c.y - 5.5).abs() < 0.6);
        assert_eq!(through_crack(&straight, &m, 0.35, &[hole], lo, hi, 1.0), Some(vec![]));
    }

    #[test]
    fn speeds() {
        let dt = 4e-8;
        let still: Vec<_> = (0..4)
            .map(|k| (k, k as f64 * dt, vec![Vec2::new(1.0, 1.0)]))
            .collect();
        let s = crack_speed(&still, 1.0);
        assert!(s[0].speed.is_none());
        assert!(s[1..].iter().all(|x| x.speed == Some(0.0)));
        let moving: Vec<_> = (0..4)
            .map(|k| (k, k as f64 * dt, vec![Vec2::new(0.0, 0.124 * k as f64)]))
            .collect();
        let s = crack_speed(&moving, 1.0);
        for x in &s[1..] {
            assert!((x.speed.unwrap() / 3.1e6 - 1.0).abs() < 1e-9);
        }
        assert!(s.iter().all(|x| x.tip_id == 0));
        // a second tip appearing far away opens a new track
        let split = vec![
            (0, 0.0, vec![Vec2::new(0.0, 0.0)]),
            (1, dt, vec![Vec2::new(0.0, 0.1), Vec2::new(10.0, 0.0)]),
        ];
        let s = crack_speed(&split, 1.0);
        assert_eq!(s.iter().map(|x| x.tip_id).collect::<Vec<_>>(), vec![0, 0, 1]);
        assert!(s[2].speed.is_none());
    }
}
