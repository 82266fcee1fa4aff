//! Morphing field α, flag points, effective local stiffness and subdomain
//! classification.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Segment, SpatialGrid, Vec2};

/// Cubic transition between `r_in` (value 1) and `r_out` (value 0).
pub fn cubic_transition(d: f64, r_in: f64, r_out: f64) -> Result<f64> {
    if !(r_out > r_in) {
        return Err(Error::param(format!(
            "transition radii need r_out > r_in (got {r_in}, {r_out})"
        )));
    }
    Ok(cubic_unchecked(d, r_in, r_out))
}

#[inline]
fn cubic_unchecked(d: f64, r_in: f64, r_out: f64) -> f64 {
    let w = r_out - r_in;
    let v = 1.0 + (d - r_in).powi(2) * (2.0 * d - 3.0 * r_out + r_in) / (w * w * w);
    v.clamp(0.0, 1.0)
}

/// A flag: a point (or, for prescribed strips, a segment) with the radii of
/// its α = 1 core and transition ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlagPoint {
    pub segment: Segment,
    /// Time the flag was raised, s.
    pub birth_time: f64,
    pub r_p: f64,
    pub big_r_p: f64,
}

impl FlagPoint {
    pub fn point(p: Vec2, birth_time: f64, r_p: f64, big_r_p: f64) -> FlagPoint {
        FlagPoint {
            segment: Segment::new(p, p),
            birth_time,
            r_p,
            big_r_p,
        }
    }

    pub fn strip(seg: Segment, birth_time: f64, r_p: f64, big_r_p: f64) -> FlagPoint {
        FlagPoint {
            segment: seg,
            birth_time,
            r_p,
            big_r_p,
        }
    }

    /// Runtime flag with `r_p = 2δ`, `R_p = 4δ`.
    pub fn runtime(p: Vec2, birth_time: f64, delta: f64) -> FlagPoint {
        FlagPoint::point(p, birth_time, 2.0 * delta, 4.0 * delta)
    }

    /// Checks `r_p ≥ δ` and `R_p − r_p ≥ 2δ`.
    pub fn validate(&self, delta: f64) -> Result<()> {
        let tol = 1e-12 * delta;
        if self.r_p + tol < delta {
            return Err(Error::validation(
                "r₁ ≥ δ",
                format!("inner radius {} mm is below the horizon {} mm", self.r_p, delta),
            ));
        }
        if self.big_r_p - self.r_p + tol < 2.0 * delta {
            return Err(Error::validation(
                "r₂ − r₁ ≥ 2δ",
                format!(
                    "transition width {} mm is below 2δ = {} mm",
                    self.big_r_p - self.r_p,
                    2.0 * delta
                ),
            ));
        }
        Ok(())
    }

    pub fn distance(&self, x: &Vec2) -> f64 {
        self.segment.distance_to(x)
    }

    pub fn center(&self) -> Vec2 {
        (self.segment.start() + self.segment.end()) * 0.5
    }

    /// Radius of a disc around [`center`](Self::center) holding the support.
    pub fn reach(&self) -> f64 {
        0.5 * self.segment.length() + self.big_r_p
    }
}

/// Piecewise α of one flag: 1 inside `r_p`, cubic ring, 0 beyond `R_p`.
pub fn alpha_for_flag(x: &Vec2, p: &FlagPoint) -> f64 {
    let d = p.distance(x);
    if d <= p.r_p {
        1.0
    } else if d >= p.big_r_p {
        0.0
    } else {
        cubic_unchecked(d, p.r_p, p.big_r_p)
    }
}

/// The flag set 𝒞; only grows.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlagSet {
    pub points: Vec<FlagPoint>,
}

impl FlagSet {
    pub fn push(&mut self, p: FlagPoint) {
        self.points.push(p);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// α from the whole set at `x` (max over flags).
    pub fn alpha_at(&self, x: &Vec2) -> f64 {
        self.points.iter().map(|p| alpha_for_flag(x, p)).fold(0.0, f64::max)
    }
}

/// α sampled at a fixed set of evaluation points.
#[derive(Debug, Clone)]
pub struct MorphingField {
    pub positions: Vec<Vec2>,
    pub alpha: Vec<f64>,
    pub revision: u64,
    grid: SpatialGrid,
}

impl MorphingField {
    /// α ≡ 0 on `positions`; `cell` sizes the search grid.
    pub fn new(positions: Vec<Vec2>, cell: f64) -> MorphingField {
        let grid = SpatialGrid::build(&positions, cell);
        MorphingField {
            alpha: vec![0.0; positions.len()],
            positions,
            revision: 0,
            grid,
        }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// Raises α to the max over `flags`; returns indices that changed
    /// (sorted). The revision is bumped iff something changed.
    pub fn merge_alpha(&mut self, flags: &[FlagPoint]) -> Vec<usize> {
        let mut changed = Vec::new();
        for f in flags {
            let c = f.center();
            let positions = &self.positions;
            let alpha = &mut self.alpha;
            self.grid.for_each_candidate(&c, f.reach(), |i| {
                let a = alpha_for_flag(&positions[i], f);
                if a > alpha[i] {
                    alpha[i] = a;
                    changed.push(i);
                }
            });
        }
        changed.sort_unstable();
        changed.dedup();
        if !changed.is_empty() {
            self.revision += 1;
        }
        changed
    }

    /// Classification of the point at `x` with value `alpha_x` from the
    /// field values within `delta`.
    pub fn classify(&self, x: &Vec2, alpha_x: f64, delta: f64) -> Subdomain {
        let mut all_zero = alpha_x == 0.0;
        let mut all_one = alpha_x == 1.0;
        let d2 = delta * delta;
        self.grid.for_each_candidate(x, delta, |i| {
            if (self.positions[i] - x).norm_squared() <= d2 {
                all_zero &= self.alpha[i] == 0.0;
                all_one &= self.alpha[i] == 1.0;
            }
        });
        if all_zero {
            Subdomain::Continuum
        } else if all_one {
            Subdomain::Peridynamic
        } else {
            Subdomain::Mixed
        }
    }
}

/// Ω₁ (pure continuum), Ω₂ (pure PD) or Ω_m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subdomain {
    Continuum,
    Peridynamic,
    Mixed,
}

/// `ξ⊗ξ⊗ξ⊗ξ` in Voigt form for engineering shear strain.
#[inline]
pub fn xi4_voigt(xi: &Vec2) -> Matrix3<f64> {
    let (x, y) = (xi.x, xi.y);
    let (x2, y2) = (x * x, y * y);
    Matrix3::new(
        x2 * x2,
        x2 * y2,
        x2 * x * y,
        x2 * y2,
        y2 * y2,
        x * y2 * y,
        x2 * x * y,
        x * y2 * y,
        x2 * y2,
    )
}

/// Neighbourhood data needed to evaluate the effective stiffness.
pub struct KernelSum<'a> {
    pub pd_positions: &'a [Vec2],
    pub pd_weights: &'a [f64],
    pub pd_alpha: &'a [f64],
    pub pd_grid: &'a SpatialGrid,
    pub slits: &'a [Segment],
    pub delta: f64,
    pub tau0: f64,
    pub l: f64,
}

impl KernelSum<'_> {
    /// `Σ (α(x) + α(x'))/2 c⁰ ξ⊗ξ⊗ξ⊗ξ w'` over PD points within δ.
    pub fn degradation(&self, x: &Vec2, alpha_x: f64) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        let d2 = self.delta * self.delta;
        self.pd_grid.for_each_candidate(x, self.delta, |j| {
            let xi = self.pd_positions[j] - x;
            let r2 = xi.norm_squared();
            if r2 > d2 || r2 == 0.0 {
                return;
            }
            let abar = 0.5 * (alpha_x + self.pd_alpha[j]);
            if abar == 0.0 || self.slits.iter().any(|s| s.crosses(x, &self.pd_positions[j])) {
                return;
            }
            let r = r2.sqrt();
            let c = abar * self.tau0 * (-r / self.l).exp() * self.pd_weights[j];
            m += xi4_voigt(&xi) * c;
        });
        m
    }

    /// Full moment `Σ c⁰ ξ⊗ξ⊗ξ⊗ξ w'` (α ≡ 1).
    pub fn moment(&self, x: &Vec2) -> Matrix3<f64> {
        let ones = vec![1.0; self.pd_positions.len()];
        KernelSum {
            pd_alpha: &ones,
            ..*self
        }
        .degradation(x, 1.0)
    }
}

/// Relative magnitude below which negative eigenvalues of E(x) are treated
/// as quadrature noise and clipped to zero.
pub const CLIP_TOLERANCE: f64 = 0.05;

/// `E(x) = E⁰ − Σ ᾱ c⁰ ξ⁴ w'`, projected onto the PSD cone.
pub fn effective_stiffness(
    x: &Vec2,
    alpha_x: f64,
    kernel: &KernelSum<'_>,
    e0: &Matrix3<f64>,
) -> Result<Matrix3<f64>> {
    let d = kernel.degradation(x, alpha_x);
    if d == Matrix3::zeros() {
        return Ok(*e0);
    }
    clip_psd(e0 - d, e0)
}

/// Clips negative eigenvalues to zero; errors if one is below
/// `−CLIP_TOLERANCE · ‖E⁰‖₂`.
pub fn clip_psd(e: Matrix3<f64>, e0: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let sym = (e + e.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let min = eig.eigenvalues.min();
    if min >= 0.0 {
        return Ok(sym);
    }
    let scale = SymmetricEigen::new(*e0).eigenvalues.max();
    if min < -CLIP_TOLERANCE * scale {
        return Err(Error::Assembly(format!(
            "effective stiffness has eigenvalue {min:.4e} MPa, beyond the clip tolerance {:.4e} MPa",
            CLIP_TOLERANCE * scale
        )));
    }
    let mut vals = eig.eigenvalues;
    for v in vals.iter_mut() {
        *v = v.max(0.0);
    }
    Ok(eig.eigenvectors * Matrix3::from_diagonal(&vals) * eig.eigenvectors.transpose())
}
