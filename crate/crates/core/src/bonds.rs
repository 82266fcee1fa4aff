//! Bond-based kernel: micro-modulus, calibration, stretch, failure, damage.
//!
//! Energy convention: the PD energy density at `x` is
//! `W(x) = ½ Σ_x' ᾱ c⁰(‖ξ‖) (ξ·η)² w'`, so one unordered bond stores
//! `ᾱ c⁰ (ξ·η)² w w'` and the kernel moment equals the plane-stress tensor
//! under the calibration below.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Segment, SpatialGrid, Vec2};
use crate::mesh::PdPoints;

/// Poisson ratio imposed by the bond-based model in 2D.
pub const BOND_POISSON: f64 = 1.0 / 3.0;

pub fn micro_modulus_c0(r: f64, tau0: f64, l: f64) -> f64 {
    tau0 * (-r / l).exp()
}

/// Lower incomplete gamma for integer order: `∫₀^x t^(n) e^(−t) dt`.
fn lower_gamma_int(n: u32, x: f64) -> f64 {
    // n! (1 − e^−x Σ_{k≤n} x^k/k!)
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut fact = 1.0;
    for k in 1..=n {
        term *= x / k as f64;
        sum += term;
        fact *= k as f64;
    }
    fact * (-(-x).exp_m1() - (-x).exp() * (sum - 1.0))
}

/// `∫₀^δ r^n e^(−r/l) dr`.
pub fn radial_moment(n: u32, delta: f64, l: f64) -> f64 {
    l.powi(n as i32 + 1) * lower_gamma_int(n, delta / l)
}

/// τ0 such that the 1111 kernel moment `τ0 (3π/4) ∫₀^δ r⁵ e^(−r/l) dr`
/// equals `E / (1 − ν²)`.
pub fn calibrate_tau0(e: f64, nu: f64, delta: f64, l: f64) -> Result<f64> {
    if (nu - BOND_POISSON).abs() > 1e-12 {
        return Err(Error::Calibration(format!(
            "bond-based kernel requires ν = 1/3 in plane stress, got {nu}"
        )));
    }
    if !(e > 0.0 && delta > 0.0 && l > 0.0) {
        return Err(Error::Calibration(format!(
            "E, δ and l must be positive (E = {e}, δ = {delta}, l = {l})"
        )));
    }
    let m = 0.75 * std::f64::consts::PI * radial_moment(5, delta, l);
    Ok(e / (1.0 - nu * nu) / m)
}

/// Energy per unit crack length carried by bonds crossing a straight line,
/// per unit squared stretch: `∫₀^δ dz ∫_z^δ 2 acos(z/r) c⁰(r) r⁴ r dr`.
fn crossing_energy_factor(tau0: f64, l: f64, delta: f64) -> f64 {
    // r = z + (δ − z) t² removes the square-root behaviour of acos at r = z
    let n = 400;
    let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let inner = |z: f64| -> f64 {
        let span = delta - z;
        if span <= 0.0 {
            return 0.0;
        }
        let g = |t: f64| {
            let r = z + span * t * t;
            if r <= 0.0 {
                return 0.0;
            }
            let ang = 2.0 * (z / r).clamp(-1.0, 1.0).acos();
            ang * micro_modulus_c0(r, tau0, l) * r.powi(5) * 2.0 * span * t
        };
        simpson(&g, 0.0, 1.0)
    };
    simpson(&inner, 0.0, delta)
}

/// Critical stretch whose crossing-bond fracture energy equals `G0`.
///
/// `G0` is in J/mm² = 1e3 N/mm; the kernel works in N and mm.
pub fn critical_stretch_from_g0(g0: f64, tau0: f64, l: f64, delta: f64) -> f64 {
    if g0 <= 0.0 {
        return 0.0;
    }
    let g_nmm = g0 * 1e3;
    (g_nmm / crossing_energy_factor(tau0, l, delta)).sqrt()
}

pub fn bond_stretch(xi: &Vec2, eta: &Vec2) -> Result<f64> {
    let r = xi.norm();
    if r == 0.0 {
        return Err(Error::param("bond stretch of a zero-length bond"));
    }
    Ok(((xi + eta).norm() - r) / r)
}

/// Resolved elastic-brittle material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Young's modulus, MPa.
    pub e: f64,
    pub nu: f64,
    /// Density, t/mm³.
    pub rho: f64,
    pub delta: f64,
    pub l: f64,
    pub tau0: f64,
    pub s_crit: f64,
    pub sigma_crit: Option<f64>,
    /// J/mm².
    pub g0: Option<f64>,
}

impl MaterialParams {
    /// Calibrates τ0 and resolves s_crit. Exactly one of `s_crit`, `g0`
    /// must be given.
    pub fn new(
        e: f64,
        rho: f64,
        delta: f64,
        l: f64,
        s_crit: Option<f64>,
        g0: Option<f64>,
        sigma_crit: Option<f64>,
    ) -> Result<MaterialParams> {
        if !(rho > 0.0) {
            return Err(Error::param(format!("density must be positive, got {rho}")));
        }
        let tau0 = calibrate_tau0(e, BOND_POISSON, delta, l)?;
        let s_crit = match (s_crit, g0) {
            (Some(s), None) if s >= 0.0 => s,
            (None, Some(g)) if g >= 0.0 => critical_stretch_from_g0(g, tau0, l, delta),
            (Some(_), Some(_)) => {
                return Err(Error::validation(
                    "exactly one of s_crit, G0",
                    "both s_crit and G0 were given",
                ))
            }
            (None, None) => {
                return Err(Error::validation(
                    "exactly one of s_crit, G0",
                    "neither s_crit nor G0 was given",
                ))
            }
            _ => return Err(Error::param("s_crit and G0 must be non-negative")),
        };
        Ok(MaterialParams {
            e,
            nu: BOND_POISSON,
            rho,
            delta,
            l,
            tau0,
            s_crit,
            sigma_crit,
            g0,
        })
    }

    pub fn c0(&self, r: f64) -> f64 {
        micro_modulus_c0(r, self.tau0, self.l)
    }

    /// Plane-stress elasticity in Voigt order (εxx, εyy, γxy), MPa.
    pub fn e0(&self) -> nalgebra::Matrix3<f64> {
        plane_stress(self.e, self.nu)
    }
}

pub fn plane_stress(e: f64, nu: f64) -> nalgebra::Matrix3<f64> {
    let f = e / (1.0 - nu * nu);
    nalgebra::Matrix3::new(f, f * nu, 0.0, f * nu, f, 0.0, 0.0, 0.0, f * 0.5 * (1.0 - nu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    /// PD point ids, `i < j` is not implied; ξ points from `i` to `j`.
    pub i: u32,
    pub j: u32,
    pub xi: Vec2,
    pub length: f64,
    pub c0: f64,
    /// Product of the two endpoint quadrature weights, mm⁴.
    pub weight_product: f64,
    pub intact: bool,
}

impl Bond {
    /// `½ c⁰ s_crit² ‖ξ‖⁴`.
    pub fn w_crit(&self, s_crit: f64) -> f64 {
        0.5 * self.c0 * s_crit * s_crit * self.length.powi(4)
    }

    pub fn stretch(&self, u: &[Vec2]) -> f64 {
        let eta = u[self.j as usize] - u[self.i as usize];
        ((self.xi + eta).norm() - self.length) / self.length
    }
}

/// Damage at one point with a flag for points that own no bond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Damage {
    pub phi: f64,
    pub no_bonds: bool,
}

/// Bond table over PD points, filled lazily.
///
/// Activating a point inserts every bond to a not yet activated partner, so
/// each unordered pair is stored once and ids are assigned in activation
/// order.
#[derive(Debug, Clone)]
pub struct BondTable {
    pub delta: f64,
    tau0: f64,
    l: f64,
    grid: SpatialGrid,
    positions: Vec<Vec2>,
    weights: Vec<f64>,
    slits: Vec<Segment>,
    pub bonds: Vec<Bond>,
    point_bonds: Vec<Vec<u32>>,
    activated: Vec<bool>,
    /// Per point sums of `c⁰ ‖ξ‖⁴ w'` (all bonds, intact bonds).
    wsum_all: Vec<f64>,
    wsum_intact: Vec<f64>,
    n_broken: usize,
}

impl BondTable {
    pub fn new(points: &PdPoints, slits: &[Segment], delta: f64, tau0: f64, l: f64) -> Result<BondTable> {
        if !(delta > 0.0) {
            return Err(Error::param(format!("horizon must be positive, got {delta}")));
        }
        let n = points.len();
        Ok(BondTable {
            delta,
            tau0,
            l,
            grid: SpatialGrid::build(&points.positions, delta),
            positions: points.positions.clone(),
            weights: points.weights.clone(),
            slits: slits.to_vec(),
            bonds: Vec::new(),
            point_bonds: vec![Vec::new(); n],
            activated: vec![false; n],
            wsum_all: vec![0.0; n],
            wsum_intact: vec![0.0; n],
            n_broken: 0,
        })
    }

    /// Every pair within δ not blocked by a slit.
    pub fn find_bond_candidates(
        points: &PdPoints,
        slits: &[Segment],
        delta: f64,
        tau0: f64,
        l: f64,
    ) -> Result<BondTable> {
        let mut t = BondTable::new(points, slits, delta, tau0, l)?;
        let all: Vec<usize> = (0..points.len()).collect();
        t.activate(&all);
        Ok(t)
    }

    pub fn n_points(&self) -> usize {
        self.activated.len()
    }

    pub fn len(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bonds.is_empty()
    }

    pub fn n_broken(&self) -> usize {
        self.n_broken
    }

    pub fn is_activated(&self, p: usize) -> bool {
        self.activated[p]
    }

    pub fn bonds_of(&self, p: usize) -> &[u32] {
        &self.point_bonds[p]
    }

    pub fn blocked(&self, a: &Vec2, b: &Vec2) -> bool {
        self.slits.iter().any(|s| s.crosses(a, b))
    }

    /// Inserts the bond families of `points` (ascending order); returns the
    /// range of new bond ids.
    pub fn activate(&mut self, points: &[usize]) -> std::ops::Range<usize> {
        let start = self.bonds.len();
        let mut order: Vec<usize> = points.iter().copied().filter(|&p| !self.activated[p]).collect();
        order.sort_unstable();
        order.dedup();
        let d2 = self.delta * self.delta;
        for p in order {
            let xp = self.positions[p];
            let mut cand = Vec::new();
            self.grid.for_each_candidate(&xp, self.delta, |q| {
                if q != p && !self.activated[q] {
                    cand.push(q);
                }
            });
            cand.sort_unstable();
            for q in cand {
                let xi = self.positions[q] - xp;
                let r2 = xi.norm_squared();
                if r2 > d2 || r2 == 0.0 || self.blocked(&xp, &self.positions[q]) {
                    continue;
                }
                let length = r2.sqrt();
                let bond = Bond {
                    i: p as u32,
                    j: q as u32,
                    xi,
                    length,
                    c0: micro_modulus_c0(length, self.tau0, self.l),
                    weight_product: self.weights[p] * self.weights[q],
                    intact: true,
                };
                let id = self.bonds.len() as u32;
                let k = bond.c0 * length.powi(4);
                self.wsum_all[p] += k * self.weights[q];
                self.wsum_intact[p] += k * self.weights[q];
                self.wsum_all[q] += k * self.weights[p];
                self.wsum_intact[q] += k * self.weights[p];
                self.point_bonds[p].push(id);
                self.point_bonds[q].push(id);
                self.bonds.push(bond);
            }
            self.activated[p] = true;
        }
        start..self.bonds.len()
    }

    /// Activates `points` and every point within δ of them, so all bonds
    /// that can see a nonzero α half-sum exist with complete families.
    pub fn activate_with_neighbours(&mut self, points: &[usize]) -> std::ops::Range<usize> {
        let mut all = Vec::new();
        let d2 = self.delta * self.delta;
        for &p in points {
            let xp = self.positions[p];
            if !self.activated[p] {
                all.push(p);
            }
            self.grid.for_each_candidate(&xp, self.delta, |q| {
                if !self.activated[q] && (self.positions[q] - xp).norm_squared() <= d2 {
                    all.push(q);
                }
            });
        }
        self.activate(&all)
    }

    /// Breaks every intact bond among `candidates` whose stretch reaches
    /// `s_crit`. `u` holds displacements of all PD points. Returns the newly
    /// broken ids, sorted.
    pub fn apply_failure(&mut self, candidates: &[u32], u: &[Vec2], s_crit: f64) -> Vec<u32> {
        let bonds = &self.bonds;
        let mut broken: Vec<u32> = candidates
            .par_iter()
            .copied()
            .filter(|&b| {
                let bd = &bonds[b as usize];
                bd.intact && bd.stretch(u) >= s_crit
            })
            .collect();
        broken.sort_unstable();
        broken.dedup();
        for &b in &broken {
            self.break_bond(b);
        }
        broken
    }

    /// Same as [`apply_failure`](Self::apply_failure) over the whole table.
    pub fn apply_failure_all(&mut self, u: &[Vec2], s_crit: f64) -> Vec<u32> {
        let ids: Vec<u32> = (0..self.bonds.len() as u32).collect();
        self.apply_failure(&ids, u, s_crit)
    }

    fn break_bond(&mut self, b: u32) {
        let bd = &mut self.bonds[b as usize];
        debug_assert!(bd.intact);
        bd.intact = false;
        let (i, j) = (bd.i as usize, bd.j as usize);
        let k = bd.c0 * bd.length.powi(4);
        self.wsum_intact[i] -= k * self.weights[j];
        self.wsum_intact[j] -= k * self.weights[i];
        self.n_broken += 1;
    }

    /// Damage at a point from the running sums (the ½ s_crit² factor of
    /// w_crit cancels in the ratio).
    pub fn point_damage(&self, p: usize) -> Damage {
        if self.point_bonds[p].is_empty() {
            return Damage {
                phi: 0.0,
                no_bonds: true,
            };
        }
        let phi = if self.wsum_intact[p] == self.wsum_all[p] {
            0.0
        } else {
            (1.0 - self.wsum_intact[p] / self.wsum_all[p]).clamp(0.0, 1.0)
        };
        Damage { phi, no_bonds: false }
    }

    /// Damage of an element aggregated over its PD points with their weights.
    pub fn element_damage(&self, points: &PdPoints, e: usize) -> Damage {
        let mut all = 0.0;
        let mut intact = 0.0;
        let mut any = false;
        for p in points.of_element(e) {
            if !self.point_bonds[p].is_empty() {
                any = true;
                all += self.wsum_all[p] * self.weights[p];
                intact += self.wsum_intact[p] * self.weights[p];
            }
        }
        if !any {
            return Damage {
                phi: 0.0,
                no_bonds: true,
            };
        }
        let phi = if intact == all { 0.0 } else { (1.0 - intact / all).clamp(0.0, 1.0) };
        Damage { phi, no_bonds: false }
    }
}

/// Damage at point `p` recomputed from the bond list with literal w_crit
/// weights.
pub fn damage(p: usize, table: &BondTable, s_crit: f64) -> Damage {
    let mut num = 0.0;
    let mut den = 0.0;
    for &b in table.bonds_of(p) {
        let bd = &table.bonds[b as usize];
        let other = if bd.i as usize == p { bd.j } else { bd.i } as usize;
        let w = bd.w_crit(s_crit) * table.weights[other];
        den += w;
        if bd.intact {
            num += w;
        }
    }
    if table.bonds_of(p).is_empty() || den == 0.0 {
        return Damage {
            phi: 0.0,
            no_bonds: table.bonds_of(p).is_empty(),
        };
    }
    Damage {
        phi: 1.0 - num / den,
        no_bonds: false,
    }
}
