//! Scenario configuration: TOML schema, validation and model construction.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adaptivity::{check_expansion_radius, Coupling, CriterionMode, VonMisesForm};
use crate::assembly::{Constraint, LoadProgram};
use crate::bonds::MaterialParams;
use crate::error::{Error, Result};
use crate::geometry::{Segment, Vec2};
use crate::integrator::{critical_dt, wave_speeds, Criterion, Simulation, WaveSpeeds};
use crate::mesh::{
    generate_structured_quad_mesh, load_unstructured_mesh, mirrored_mesh, perforated_mesh, Circle, Mesh, Outline, PdQuadrature,
};
use crate::morphing::FlagPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub geometry: GeometryConfig,
    pub material: MaterialConfig,
    pub criterion: CriterionConfig,
    #[serde(default)]
    pub load: LoadProgram,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub flags: Vec<FlagConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometryConfig {
    Structured {
        lo: [f64; 2],
        hi: [f64; 2],
        spacing: f64,
        #[serde(default)]
        notches: Vec<Segment>,
    },
    Perforated {
        outline: Outline,
        #[serde(default)]
        holes: Vec<Circle>,
        /// Extra holes from an `x y radius` file, relative to the config.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        holes_file: Option<PathBuf>,
        spacing: f64,
        /// Mesh the half `x ≤ mirror_x` and reflect it.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mirror_x: Option<f64>,
        #[serde(default)]
        notches: Vec<Segment>,
    },
    File {
        path: PathBuf,
        #[serde(default)]
        notches: Vec<Segment>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    /// Young's modulus, MPa.
    pub e: f64,
    /// Density, t/mm³.
    pub rho: f64,
    /// Energy release rate, J/mm².
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_crit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionConfig {
    pub mode: CriterionMode,
    /// MPa, strength mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_crit: Option<f64>,
    #[serde(default)]
    pub von_mises: VonMisesForm,
    /// Raise flags while running.
    #[serde(default = "yes")]
    pub adaptive: bool,
    /// Runtime flag radii; default `2δ` and `4δ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_r_p: Option<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    /// Δx̄, mm; defaults to the mean element edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    /// δ / Δx̄.
    #[serde(default = "horizon_factor")]
    pub horizon_factor: f64,
    /// δ / l.
    #[serde(default = "length_ratio")]
    pub length_ratio: f64,
    /// s; defaults to `safety · Δt_cr`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "safety")]
    pub safety: f64,
    /// s.
    pub total_time: f64,
    #[serde(default)]
    pub quadrature: PdQuadrature,
}

fn horizon_factor() -> f64 {
    3.0
}
fn length_ratio() -> f64 {
    15.0
}
fn safety() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Steps between snapshots and crack samples.
    #[serde(default = "every")]
    pub every: usize,
    #[serde(default = "phi_threshold")]
    pub phi_threshold: f64,
    #[serde(default = "yes")]
    pub snapshots: bool,
    /// Crack seeds; default notch tips and initial flag centres.
    #[serde(default)]
    pub seeds: Vec<[f64; 2]>,
}

fn every() -> usize {
    25
}
fn phi_threshold() -> f64 {
    0.35
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            every: every(),
            phi_threshold: phi_threshold(),
            snapshots: true,
            seeds: Vec::new(),
        }
    }
}

/// Initial PD region: a disc around `at`, or a strip along `at`–`to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagConfig {
    pub at: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<[f64; 2]>,
    pub r1: f64,
    pub r2: f64,
}

impl FlagConfig {
    pub fn flag(&self) -> FlagPoint {
        let a = Vec2::new(self.at[0], self.at[1]);
        let b = self.to.map(|t| Vec2::new(t[0], t[1])).unwrap_or(a);
        FlagPoint::strip(Segment::new(a, b), 0.0, self.r1, self.r2)
    }
}

/// Reads `x y radius` lines; `#` starts a comment.
pub fn parse_pores(text: &str, path: &Path) -> Result<Vec<Circle>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message: e.to_string(),
            })?;
        if v.len() != 3 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message: format!("expected `x y radius`, got {} values", v.len()),
            });
        }
        out.push(Circle {
            center: [v[0], v[1]],
            radius: v[2],
        });
    }
    Ok(out)
}

/// Derived quantities of a validated config.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub dx: f64,
    pub delta: f64,
    pub l: f64,
    pub tau0: f64,
    pub s_crit: f64,
    pub dt: f64,
    pub dt_cr: f64,
    /// Shortest element edge L, mm.
    pub min_edge: f64,
    pub n_steps: usize,
    pub r_p: f64,
    pub big_r_p: f64,
    pub c: f64,
    pub c_s: f64,
    pub c_r: f64,
    pub n_nodes: usize,
    pub n_elements: usize,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<ScenarioConfig> {
        toml::from_str(text).map_err(|e| Error::validation("well-formed config", e.to_string()))
    }

    /// Reads, parses and resolves relative paths against the file's directory.
    pub fn load(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = ScenarioConfig::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        match &mut cfg.geometry {
            GeometryConfig::File { path, .. } if path.is_relative() => *path = base.join(&*path),
            GeometryConfig::Perforated {
                holes_file: Some(p), ..
            } if p.is_relative() => *p = base.join(&*p),
            _ => {}
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn notches(&self) -> &[Segment] {
        match &self.geometry {
            GeometryConfig::Structured { notches, .. }
            | GeometryConfig::Perforated { notches, .. }
            | GeometryConfig::File { notches, .. } => notches,
        }
    }

    /// Holes of a perforated geometry, inline and from file.
    pub fn holes(&self) -> Result<Vec<Circle>> {
        match &self.geometry {
            GeometryConfig::Perforated { holes, holes_file, .. } => {
                let mut out = holes.clone();
                if let Some(p) = holes_file {
                    let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                    out.extend(parse_pores(&text, p)?);
                }
                Ok(out)
            }
            _ => Ok(Vec::new()),
        }
    }

    pub fn build_mesh(&self) -> Result<Mesh> {
        let mut mesh = match &self.geometry {
            GeometryConfig::Structured { lo, hi, spacing, .. } => {
                generate_structured_quad_mesh(Vec2::new(lo[0], lo[1]), Vec2::new(hi[0], hi[1]), *spacing)?
            }
            GeometryConfig::Perforated {
                outline,
                spacing,
                mirror_x: None,
                ..
            } => perforated_mesh(outline, &self.holes()?, *spacing)?,
            GeometryConfig::Perforated {
                outline,
                spacing,
                mirror_x: Some(x0),
                ..
            } => mirrored_mesh(outline, &self.holes()?, *spacing, *x0)?,
            GeometryConfig::File { path, .. } => load_unstructured_mesh(path)?,
        };
        for n in self.notches() {
            mesh.insert_pre_notch(*n)?;
        }
        Ok(mesh)
    }

    pub fn speeds(&self) -> WaveSpeeds {
        wave_speeds(self.material.e, crate::bonds::BOND_POISSON, self.material.rho)
    }

    /// Checks every constraint against `mesh` and resolves defaults.
    pub fn resolve(&self, mesh: &Mesh) -> Result<Resolved> {
        let m = &self.material;
        if !(m.e > 0.0) || !(m.rho > 0.0) {
            return Err(Error::validation("E, ρ > 0", "Young's modulus and density must be positive"));
        }
        let n = &self.numerics;
        let dx = n.dx.unwrap_or(mesh.avg_element_size);
        if !(dx > 0.0) || !(n.horizon_factor > 0.0) || !(n.length_ratio > 0.0) {
            return Err(Error::validation("Δx̄, δ/Δx̄, δ/l > 0", "sizes must be positive"));
        }
        if !(n.total_time > 0.0) {
            return Err(Error::validation("total_time > 0", "total time must be positive"));
        }
        let delta = n.horizon_factor * dx;
        let l = delta / n.length_ratio;
        if self.criterion.mode == CriterionMode::Strength && self.criterion.sigma_crit.is_none() {
            return Err(Error::validation("σ_crit present", "strength criterion needs criterion.sigma_crit"));
        }
        if let Some(s) = self.criterion.sigma_crit {
            if !(s > 0.0) {
                return Err(Error::validation("σ_crit > 0", format!("got {s}")));
            }
        }
        let params = MaterialParams::new(m.e, m.rho, delta, l, m.s_crit, m.g0, self.criterion.sigma_crit)?;
        let speeds = self.speeds();
        let min_edge = mesh.min_edge_length()?;
        let dt_cr = critical_dt(mesh, m.e, m.rho)?;
        let dt = n.dt.unwrap_or(n.safety * dt_cr);
        if !(dt > 0.0) {
            return Err(Error::validation("Δt > 0", format!("got {dt}")));
        }
        if dt > dt_cr {
            return Err(Error::validation(
                "Δt ≤ Δt_cr",
                format!("Δt = {dt:.4e} s exceeds L/C = {dt_cr:.4e} s"),
            ));
        }
        for f in &self.flags {
            f.flag().validate(delta)?;
        }
        let r_p = self.criterion.r_p.unwrap_or(2.0 * delta);
        let big_r_p = self.criterion.big_r_p.unwrap_or(4.0 * delta);
        if self.criterion.adaptive {
            FlagPoint::point(Vec2::zeros(), 0.0, r_p, big_r_p).validate(delta)?;
            let rc = check_expansion_radius(r_p, min_edge, dt, speeds.c_r);
            if !rc.covers_min_edge {
                return Err(Error::validation(
                    "r_p ≥ L",
                    format!("flag radius {r_p} mm is below the shortest edge {min_edge} mm"),
                ));
            }
            if !rc.covers_rayleigh_step {
                return Err(Error::validation(
                    "r_p ≥ C_R·Δt",
                    format!("flag radius {r_p} mm is below C_R Δt = {} mm", rc.rayleigh_step),
                ));
            }
        }
        if self.output.every == 0 {
            return Err(Error::validation("output.every ≥ 1", "cadence must be positive"));
        }
        Ok(Resolved {
            dx,
            delta,
            l,
            tau0: params.tau0,
            s_crit: params.s_crit,
            dt,
            dt_cr,
            min_edge,
            n_steps: (n.total_time / dt).round() as usize,
            r_p,
            big_r_p,
            c: speeds.c,
            c_s: speeds.c_s,
            c_r: speeds.c_r,
            n_nodes: mesh.n_nodes(),
            n_elements: mesh.elements.len(),
        })
    }

    /// Mesh, validation and model in one go.
    pub fn validate(&self) -> Result<(Mesh, Resolved)> {
        let mesh = self.build_mesh()?;
        let r = self.resolve(&mesh)?;
        Ok((mesh, r))
    }

    pub fn build(&self) -> Result<(Simulation, Resolved)> {
        let (mesh, r) = self.validate()?;
        let m = &self.material;
        let params = MaterialParams::new(m.e, m.rho, r.delta, r.l, m.s_crit, m.g0, self.criterion.sigma_crit)?;
        let model = Coupling::new(mesh, params, self.numerics.quadrature)?;
        let flags: Vec<FlagPoint> = self.flags.iter().map(FlagConfig::flag).collect();
        let criterion = Criterion {
            mode: self.criterion.mode,
            sigma_crit: self.criterion.sigma_crit,
            von_mises: self.criterion.von_mises,
            radii: (r.r_p, r.big_r_p),
        };
        let sim = Simulation::new(
            model,
            &flags,
            self.load.clone(),
            self.constraints.clone(),
            criterion,
            self.criterion.adaptive,
            r.dt,
            None,
        )?;
        Ok((sim, r))
    }

    /// Crack seeds: configured, else notch tips (second endpoint) and flag
    /// centres.
    pub fn crack_seeds(&self) -> Vec<Vec2> {
        if !self.output.seeds.is_empty() {
            return self.output.seeds.iter().map(|s| Vec2::new(s[0], s[1])).collect();
        }
        let mut out: Vec<Vec2> = self.notches().iter().map(|n| n.end()).collect();
        out.extend(self.flags.iter().filter(|f| f.to.is_none()).map(|f| Vec2::new(f.at[0], f.at[1])));
        out
    }

    /// The config with resolved Δx̄ and Δt written in, plus the derived
    /// values as a trailing comment block.
    pub fn resolved_echo(&self, r: &Resolved) -> String {
        let mut c = self.clone();
        c.numerics.dx = Some(r.dx);
        c.numerics.dt = Some(r.dt);
        c.criterion.r_p = Some(r.r_p);
        c.criterion.big_r_p = Some(r.big_r_p);
        let mut s = c.to_toml();
        s.push_str("\n# derived\n");
        for line in toml::to_string(r).expect("resolved serializes").lines() {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
        s
    }
}
