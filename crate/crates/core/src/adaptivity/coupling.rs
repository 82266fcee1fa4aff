//! The coupled model: mesh, bonds, α fields and both stiffness parts.

use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::assembly::ccm::gauss_positions;
use crate::assembly::pd::point_displacements_into;
use crate::assembly::{CcmOperator, PdOperator, SparseMatrix};
use crate::bonds::{BondTable, MaterialParams};
use crate::error::Result;
use crate::geometry::Vec2;
use crate::mesh::{ElementKind, Mesh, NodeMap, PdPoints, PdQuadrature};
use crate::morphing::{effective_stiffness, FlagPoint, FlagSet, KernelSum, MorphingField};

/// Outcome of merging new flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpansionEvent {
    pub new_flags: Vec<FlagPoint>,
    /// Number of evaluation points (PD, Gauss, centroid) whose α rose.
    pub alpha_changed: usize,
    /// CE elements now entirely at α = 1, ascending.
    pub convert: Vec<usize>,
    pub kappa: bool,
}

#[derive(Debug, Clone)]
pub struct Coupling {
    pub mesh: Mesh,
    pub material: MaterialParams,
    pub e0: Matrix3<f64>,
    pub points: PdPoints,
    pub bonds: BondTable,
    pub flags: FlagSet,
    /// α at PD points, Gauss points, element centroids and node sites.
    pub pd_alpha: MorphingField,
    pub gp_alpha: MorphingField,
    pub centroid_alpha: MorphingField,
    pub site_alpha: MorphingField,
    pub ccm: CcmOperator,
    pub pd: PdOperator,
    /// E(x) at element centroids (stress recovery).
    pub centroid_stiffness: Vec<Matrix3<f64>>,
    /// Elements already used as flag sources.
    pub flagged: Vec<bool>,
    up_scratch: Vec<Vec2>,
}

impl Coupling {
    /// Pure continuum model (α ≡ 0) on `mesh`.
    pub fn new(mesh: Mesh, material: MaterialParams, rule: PdQuadrature) -> Result<Coupling> {
        let e0 = material.e0();
        let points = PdPoints::build(&mesh, rule);
        let bonds = BondTable::new(&points, &mesh.slits, material.delta, material.tau0, material.l)?;
        let cell = material.delta;
        let pd_alpha = MorphingField::new(points.positions.clone(), cell);
        let gp_alpha = MorphingField::new(gauss_positions(&mesh), cell);
        let centroid_alpha = MorphingField::new(mesh.elements.iter().map(|e| e.centroid).collect(), cell);
        let n_sites = mesh.nodes.iter().map(|n| n.site + 1).max().unwrap_or(0);
        let mut site_pos = vec![Vec2::zeros(); n_sites];
        for n in &mesh.nodes {
            site_pos[n.site] = n.position;
        }
        let site_alpha = MorphingField::new(site_pos, cell);
        let ccm = CcmOperator::new(&mesh, &e0);
        let n_el = mesh.elements.len();
        Ok(Coupling {
            e0,
            points,
            bonds,
            flags: FlagSet::default(),
            pd_alpha,
            gp_alpha,
            centroid_alpha,
            site_alpha,
            ccm,
            pd: PdOperator::default(),
            centroid_stiffness: vec![e0; n_el],
            flagged: vec![false; n_el],
            up_scratch: Vec::new(),
            mesh,
            material,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.mesh.n_dofs()
    }

    fn kernel(&self) -> KernelSum<'_> {
        KernelSum {
            pd_positions: &self.points.positions,
            pd_weights: &self.points.weights,
            pd_alpha: &self.pd_alpha.alpha,
            pd_grid: self.pd_alpha.grid(),
            slits: &self.mesh.slits,
            delta: self.material.delta,
            tau0: self.material.tau0,
            l: self.material.l,
        }
    }

    /// Adds flags, raises α, refreshes bonds, E(x) and element matrices.
    /// Conversion is only reported, not applied.
    pub fn expand(&mut self, new_flags: &[FlagPoint]) -> Result<ExpansionEvent> {
        if new_flags.is_empty() {
            return Ok(ExpansionEvent::default());
        }
        for f in new_flags {
            self.flags.push(*f);
        }
        let pd_changed = self.pd_alpha.merge_alpha(new_flags);
        let gp_changed = self.gp_alpha.merge_alpha(new_flags);
        let c_changed = self.centroid_alpha.merge_alpha(new_flags);
        let site_changed = self.site_alpha.merge_alpha(new_flags);
        let alpha_changed = pd_changed.len() + gp_changed.len() + c_changed.len();

        if !pd_changed.is_empty() {
            self.bonds.activate_with_neighbours(&pd_changed);
            self.pd.sync(&self.bonds, &self.pd_alpha.alpha);
        }

        // E(x) depends on α at x and at PD points within δ
        let delta = self.material.delta;
        let near = |field: &MorphingField, own: &[usize]| -> Vec<usize> {
            let mut set = own.to_vec();
            for &p in &pd_changed {
                field
                    .grid()
                    .for_each_candidate(&self.points.positions[p], delta, |g| set.push(g));
            }
            set.sort_unstable();
            set.dedup();
            set
        };
        let gp_set = near(&self.gp_alpha, &gp_changed);
        let c_set = near(&self.centroid_alpha, &c_changed);

        let kernel = self.kernel();
        let e0 = self.e0;
        let gp_new: Vec<Matrix3<f64>> = gp_set
            .par_iter()
            .map(|&g| effective_stiffness(&self.gp_alpha.positions[g], self.gp_alpha.alpha[g], &kernel, &e0))
            .collect::<Result<_>>()?;
        let c_new: Vec<Matrix3<f64>> = c_set
            .par_iter()
            .map(|&c| {
                effective_stiffness(
                    &self.centroid_alpha.positions[c],
                    self.centroid_alpha.alpha[c],
                    &kernel,
                    &e0,
                )
            })
            .collect::<Result<_>>()?;
        let mut touched = Vec::with_capacity(gp_set.len());
        for (&g, e) in gp_set.iter().zip(gp_new) {
            if self.ccm.gp_stiffness[g] != e {
                self.ccm.gp_stiffness[g] = e;
                touched.push(self.ccm.element_of_gp(g));
            }
        }
        touched.dedup();
        self.ccm.rebuild(&self.mesh, &touched);
        for (&c, e) in c_set.iter().zip(c_new) {
            self.centroid_stiffness[c] = e;
        }

        // candidate elements: centroid or a vertex site changed
        let mut cand = c_changed.clone();
        if !site_changed.is_empty() {
            let mut site_hit = vec![false; self.site_alpha.len()];
            for &s in &site_changed {
                site_hit[s] = true;
            }
            for (e, el) in self.mesh.elements.iter().enumerate() {
                if el.nodes.iter().any(|&n| site_hit[self.mesh.nodes[n].site]) {
                    cand.push(e);
                }
            }
        }
        cand.sort_unstable();
        cand.dedup();
        let convert: Vec<usize> = cand
            .into_iter()
            .filter(|&e| self.is_convertible(e))
            .collect();
        Ok(ExpansionEvent {
            new_flags: new_flags.to_vec(),
            alpha_changed,
            kappa: alpha_changed > 0 || !convert.is_empty(),
            convert,
        })
    }

    /// CE element with α = 1 at its centroid and every vertex.
    pub fn is_convertible(&self, e: usize) -> bool {
        let el = &self.mesh.elements[e];
        el.kind == ElementKind::Continuous
            && self.centroid_alpha.alpha[e] == 1.0
            && el
                .nodes
                .iter()
                .all(|&n| self.site_alpha.alpha[self.mesh.nodes[n].site] == 1.0)
    }

    pub fn convert(&mut self, ids: &[usize]) -> NodeMap {
        self.mesh.convert_to_discrete(ids)
    }

    /// `out = K u`.
    pub fn apply(&mut self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        self.ccm.apply(&self.mesh, u, out);
        let mut up = std::mem::take(&mut self.up_scratch);
        self.pd.apply(&self.bonds, &self.mesh, &self.points, u, &mut up, out);
        self.up_scratch = up;
    }

    pub fn point_displacements(&mut self, u: &[f64]) -> &[Vec2] {
        point_displacements_into(&self.mesh, &self.points, u, &mut self.up_scratch);
        &self.up_scratch
    }

    /// Scans active bonds for failure, subtracts the broken ones from the
    /// operator and returns their ids.
    pub fn fail_bonds(&mut self, u: &[f64]) -> Result<Vec<u32>> {
        if self.pd.active().is_empty() {
            return Ok(Vec::new());
        }
        let s_crit = self.material.s_crit;
        point_displacements_into(&self.mesh, &self.points, u, &mut self.up_scratch);
        let active = self.pd.active().to_vec();
        let broken = self.bonds.apply_failure(&active, &self.up_scratch, s_crit);
        self.pd.subtract_broken_bonds(&broken)?;
        Ok(broken)
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        self.ccm
            .to_sparse(&self.mesh)
            .add(&self.pd.to_sparse(&self.bonds, &self.mesh, &self.points))
    }

    /// `½ uᵀ K u` from the continuum and bond energies.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.ccm.energy(&self.mesh, u) + self.pd.energy(&self.bonds, &self.mesh, &self.points, u)
    }

    /// Element damage field.
    pub fn damage(&self) -> Vec<f64> {
        (0..self.mesh.elements.len())
            .map(|e| self.bonds.element_damage(&self.points, e).phi)
            .collect()
    }

    /// Dofs carried by discrete elements.
    pub fn pd_dofs(&self) -> usize {
        self.mesh.discrete_dofs()
    }
}
