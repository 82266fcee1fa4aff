//! Explicit central-difference integration and the adaptive time loop.

use std::time::Instant;

use crate::adaptivity::{
    bond_midpoint, flags_from_broken_bonds, flags_from_strength, Coupling, CriterionMode, VonMisesForm,
};
use crate::assembly::{
    assemble_mass, bind_constraints, remap_after_conversion, BoundLoads, Constraint, LoadProgram, MassMatrix,
    MassMode,
};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::mesh::Mesh;
use crate::morphing::FlagPoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSpeeds {
    /// `√(E/ρ)`, mm/s.
    pub c: f64,
    pub c_s: f64,
    pub c_r: f64,
}

/// `C_R / C_S` as a function of Poisson's ratio.
pub fn rayleigh_factor(nu: f64) -> f64 {
    (0.862 + 1.14 * nu) / (1.0 + nu)
}

pub fn wave_speeds(e: f64, nu: f64, rho: f64) -> WaveSpeeds {
    let c = (e / rho).sqrt();
    let c_s = (1.0 / (2.0 * (1.0 + nu))).sqrt() * c;
    WaveSpeeds {
        c,
        c_s,
        c_r: rayleigh_factor(nu) * c_s,
    }
}

/// `L / C` with `L` the shortest element edge.
pub fn critical_dt(mesh: &Mesh, e: f64, rho: f64) -> Result<f64> {
    Ok(mesh.min_edge_length()? / (e / rho).sqrt())
}

/// Lumped node masses repeated per dof.
pub fn dof_mass(lumped: &[f64]) -> Vec<f64> {
    lumped.iter().flat_map(|&m| [m, m]).collect()
}

/// Fictitious displacement at `−Δt` from a Taylor expansion with the
/// initial acceleration `M⁻¹(F₀ − K u₀)`.
pub fn bootstrap(u0: &[f64], v0: &[f64], f0: &[f64], m: &[f64], ku0: &[f64], dt: f64) -> Result<Vec<f64>> {
    check_dims(&[u0.len(), v0.len(), f0.len(), m.len(), ku0.len()])?;
    (0..u0.len())
        .map(|i| {
            if m[i] == 0.0 {
                return Err(Error::SingularMass(i));
            }
            Ok(u0[i] - dt * v0[i] + 0.5 * dt * dt * (f0[i] - ku0[i]) / m[i])
        })
        .collect()
}

/// `u(t+Δt) = M̂⁻¹[F − (K − 2M̂)u − M̂ u_prev]` with `M̂ = M/Δt²` diagonal.
pub fn central_difference(u_prev: &[f64], u: &[f64], f: &[f64], ku: &[f64], m: &[f64], dt: f64) -> Result<Vec<f64>> {
    check_dims(&[u_prev.len(), u.len(), f.len(), ku.len(), m.len()])?;
    let dt2 = dt * dt;
    Ok((0..u.len())
        .map(|i| 2.0 * u[i] - u_prev[i] + dt2 * (f[i] - ku[i]) / m[i])
        .collect())
}

fn check_dims(lens: &[usize]) -> Result<()> {
    if lens.iter().any(|&l| l != lens[0]) {
        return Err(Error::Consistency(format!("dof vectors disagree in length: {lens:?}")));
    }
    Ok(())
}

/// Mass and continuity check of one CE→DE conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct ConversionRecord {
    pub step: usize,
    pub elements: usize,
    pub mass_before: f64,
    pub mass_after: f64,
    /// Largest displacement difference between a site's old and new ids.
    pub max_site_jump: f64,
    pub n_dofs_after: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    pub step: usize,
    /// Time at the end of the step, s.
    pub t: f64,
    pub n_dofs: usize,
    pub pd_dofs: usize,
    pub newly_broken: usize,
    pub total_broken: usize,
    pub new_flags: usize,
    pub conversion: Option<ConversionRecord>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criterion {
    pub mode: CriterionMode,
    pub sigma_crit: Option<f64>,
    pub von_mises: VonMisesForm,
    /// `(r_p, R_p)` of runtime flags.
    pub radii: (f64, f64),
}

impl Criterion {
    /// Broken-bond criterion with the default radii `2δ`, `4δ`.
    pub fn bond(delta: f64) -> Criterion {
        Criterion {
            mode: CriterionMode::BrokenBond,
            sigma_crit: None,
            von_mises: VonMisesForm::Standard,
            radii: (2.0 * delta, 4.0 * delta),
        }
    }
}

/// A fully assembled model ready to step.
#[derive(Debug)]
pub struct Simulation {
    pub model: Coupling,
    pub mass: MassMatrix,
    m_dof: Vec<f64>,
    pub program: LoadProgram,
    loads: BoundLoads,
    pub constraints: Vec<Constraint>,
    prescribed: Vec<(usize, f64)>,
    pub criterion: Criterion,
    /// New flags may be raised while running.
    pub adaptive: bool,
    pub dt: f64,
    pub step: usize,
    pub t: f64,
    pub u_prev: Vec<f64>,
    pub u: Vec<f64>,
    f: Vec<f64>,
    ku: Vec<f64>,
    /// Conversion set waiting for the next remap.
    pending: Vec<usize>,
    /// Instability threshold on `max |u|`.
    pub limit: f64,
    /// Step and location of the first broken bond.
    pub first_break: Option<(usize, Vec2)>,
    /// First runtime flag (element, position).
    pub first_flag: Option<(usize, Vec2)>,
}

impl Simulation {
    /// Applies the initial flags, converts any fully PD elements and
    /// bootstraps from rest (or `v0`).
    pub fn new(
        mut model: Coupling,
        initial_flags: &[FlagPoint],
        program: LoadProgram,
        constraints: Vec<Constraint>,
        criterion: Criterion,
        adaptive: bool,
        dt: f64,
        v0: Option<Vec<f64>>,
    ) -> Result<Simulation> {
        if criterion.mode == CriterionMode::Strength && criterion.sigma_crit.is_none() {
            return Err(Error::validation("σ_crit present", "strength criterion needs sigma_crit"));
        }
        let mut mass = assemble_mass(&model.mesh, model.material.rho, MassMode::Lumped)?;
        let mut u = vec![0.0; model.n_dofs()];
        let mut v = v0.unwrap_or_else(|| vec![0.0; u.len()]);
        check_dims(&[u.len(), v.len()])?;
        if !initial_flags.is_empty() {
            for f in initial_flags {
                f.validate(model.material.delta)?;
            }
            let ev = model.expand(initial_flags)?;
            if !ev.convert.is_empty() {
                let map = model.convert(&ev.convert);
                remap_after_conversion(&map, &model.mesh, model.material.rho, &mut mass, &mut [&mut u, &mut v])?;
            }
        }
        let (lo, hi) = model.mesh.bounds();
        let limit = 1e3 * (hi - lo).norm();
        let m_dof = dof_mass(mass.lumped().expect("lumped"));
        let loads = program.bind(&model.mesh)?;
        let prescribed = bind_constraints(&model.mesh, &constraints)?;
        let mut f = vec![0.0; u.len()];
        loads.assemble(&program, 0.0, &mut f);
        let mut ku = vec![0.0; u.len()];
        model.apply(&u, &mut ku);
        let mut u_prev = bootstrap(&u, &v, &f, &m_dof, &ku, dt)?;
        for &(d, val) in &prescribed {
            u_prev[d] = val;
            u[d] = val;
        }
        Ok(Simulation {
            model,
            mass,
            m_dof,
            program,
            loads,
            constraints,
            prescribed,
            criterion,
            adaptive,
            dt,
            step: 0,
            t: 0.0,
            u_prev,
            u,
            f,
            ku,
            pending: Vec::new(),
            limit,
            first_break: None,
            first_flag: None,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.u.len()
    }

    /// Conversion detected but not yet applied.
    pub fn kappa(&self) -> bool {
        !self.pending.is_empty()
    }

    fn remap(&mut self) -> Result<ConversionRecord> {
        let ids = std::mem::take(&mut self.pending);
        let mass_before = self.mass.total();
        let map = self.model.convert(&ids);
        remap_after_conversion(
            &map,
            &self.model.mesh,
            self.model.material.rho,
            &mut self.mass,
            &mut [&mut self.u_prev, &mut self.u],
        )?;
        let mut jump = 0.0f64;
        for (old, new) in map.new_ids() {
            for c in 0..2 {
                jump = jump.max((self.u[2 * new + c] - self.u[2 * old + c]).abs());
            }
        }
        self.m_dof = dof_mass(self.mass.lumped().expect("lumped"));
        self.loads = self.program.bind(&self.model.mesh)?;
        self.prescribed = bind_constraints(&self.model.mesh, &self.constraints)?;
        let n = self.model.n_dofs();
        self.f.resize(n, 0.0);
        self.ku.resize(n, 0.0);
        Ok(ConversionRecord {
            step: self.step + 1,
            elements: ids.len(),
            mass_before,
            mass_after: self.mass.total(),
            max_site_jump: jump,
            n_dofs_after: n,
        })
    }

    fn check_consistency(&self) -> Result<()> {
        let n = self.model.n_dofs();
        let lens = [n, self.u.len(), self.u_prev.len(), self.m_dof.len(), self.f.len(), self.ku.len()];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::Consistency(format!(
                "step {}: dimensions (model, u, u_prev, M, F, Ku) = {lens:?}",
                self.step + 1
            )));
        }
        Ok(())
    }

    /// Advances one step in flowchart order: remap, failure and criterion
    /// scan with α update, load, solve.
    pub fn step_once(&mut self) -> Result<StepInfo> {
        let clock = Instant::now();
        let conversion = if self.kappa() { Some(self.remap()?) } else { None };
        self.check_consistency()?;

        let broken = self.model.fail_bonds(&self.u)?;
        if self.first_break.is_none() {
            if let Some(&b) = broken.first() {
                let m = &self.model;
                self.first_break = Some((self.step + 1, bond_midpoint(&m.bonds, &m.points, b)));
            }
        }
        let mut new_flags = 0;
        if self.adaptive {
            let radii = self.criterion.radii;
            let found = match self.criterion.mode {
                CriterionMode::BrokenBond => flags_from_broken_bonds(
                    &broken,
                    &self.model.bonds,
                    &self.model.points,
                    &self.model.mesh,
                    &mut self.model.flagged,
                    self.t,
                    radii,
                ),
                CriterionMode::Strength => flags_from_strength(
                    &self.model.mesh,
                    &self.u,
                    &self.model.centroid_stiffness,
                    self.criterion.sigma_crit.unwrap_or(f64::INFINITY),
                    self.criterion.von_mises,
                    &mut self.model.flagged,
                    self.t,
                    radii,
                ),
            };
            if self.first_flag.is_none() {
                if let Some((e, _)) = found.first() {
                    self.first_flag = Some((*e, self.model.mesh.elements[*e].centroid));
                }
            }
            new_flags = found.len();
            if !found.is_empty() {
                let flags: Vec<FlagPoint> = found.into_iter().map(|(_, f)| f).collect();
                let ev = self.model.expand(&flags)?;
                self.pending = ev.convert;
            }
        }

        self.loads.assemble(&self.program, self.t, &mut self.f);
        self.model.apply(&self.u, &mut self.ku);
        let mut next = central_difference(&self.u_prev, &self.u, &self.f, &self.ku, &self.m_dof, self.dt)?;
        for &(d, val) in &self.prescribed {
            next[d] = val;
        }
        let max_u = next.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !(max_u <= self.limit) {
            return Err(Error::Instability {
                step: self.step + 1,
                max_u,
                limit: self.limit,
            });
        }
        self.u_prev = std::mem::replace(&mut self.u, next);
        self.step += 1;
        self.t = self.step as f64 * self.dt;
        Ok(StepInfo {
            step: self.step,
            t: self.t,
            n_dofs: self.n_dofs(),
            pd_dofs: self.model.pd_dofs(),
            newly_broken: broken.len(),
            total_broken: self.model.bonds.n_broken(),
            new_flags,
            conversion,
            wall_ms: clock.elapsed().as_secs_f64() * 1e3,
        })
    }

    /// Runs `n` steps, calling `observe` after each.
    pub fn run(&mut self, n: usize, mut observe: impl FnMut(&Simulation, &StepInfo) -> Result<()>) -> Result<()> {
        for _ in 0..n {
            let info = self.step_once()?;
            observe(self, &info)?;
        }
        Ok(())
    }

    /// Velocity at the current step from the last two displacements
    /// (backward difference), mm/s.
    pub fn velocity(&self) -> Vec<f64> {
        self.u
            .iter()
            .zip(&self.u_prev)
            .map(|(a, b)| (a - b) / self.dt)
            .collect()
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.velocity()
            .iter()
            .zip(&self.m_dof)
            .map(|(v, m)| 0.5 * m * v * v)
            .sum()
    }

    pub fn strain_energy(&self) -> f64 {
        self.model.energy(&self.u)
    }

    pub fn dof_masses(&self) -> &[f64] {
        &self.m_dof
    }

    pub fn force(&self) -> &[f64] {
        &self.f
    }
}
