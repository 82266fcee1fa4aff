//! Shared helpers for the integration tests.

#![allow(dead_code)]

use pdccm::config::{GeometryConfig, ScenarioConfig};
use pdccm::geometry::{Segment, Vec2};
use pdccm::integrator::Simulation;
use pdccm::assembly::LoadHistory;
use pdccm::mesh::Outline;
use pdccm::scenarios::branch_plate;
use proptest::prelude::*;

/// Small notched glass plate, square of `side` mm with a notch of `notch`
/// mm (a whole number at Δx̄ = 1) up the middle, pulled sideways with `sigma` MPa.
pub fn small_plate(side: f64, notch: f64, sigma: f64) -> ScenarioConfig {
    let mut c = branch_plate(1.0);
    c.name = "small_plate".into();
    let mid = side / 2.0;
    if let GeometryConfig::Perforated {
        outline,
        mirror_x,
        notches,
        ..
    } = &mut c.geometry
    {
        *outline = Outline::Rectangle {
            lo: [0.0, 0.0],
            hi: [side, side],
        };
        *mirror_x = Some(mid);
        *notches = vec![Segment::new(Vec2::new(mid, 0.0), Vec2::new(mid, notch))];
    }
    for t in &mut c.load.tractions {
        t.history = LoadHistory::Constant { value: sigma };
    }
    c.flags[0].at = [mid, notch];
    c.flags[0].r1 = 3.0;
    c.flags[0].r2 = 9.0;
    c
}

#[derive(Debug, Clone)]
pub struct Case {
    pub notch: f64,
    pub sigma: f64,
    pub steps: usize,
}

pub fn cases() -> impl Strategy<Value = Case> {
    (6..=12u32, 25.0..60.0f64, 150..260usize).prop_map(|(notch, sigma, steps)| Case {
        notch: notch as f64,
        sigma,
        steps,
    })
}

/// State the monotonicity properties look at.
#[derive(Debug, Clone, PartialEq)]
pub struct Observed {
    pub intact: Vec<bool>,
    pub pd_alpha: Vec<f64>,
    pub phi: Vec<f64>,
    pub flags: usize,
}

pub fn observe(sim: &Simulation) -> Observed {
    let m = &sim.model;
    Observed {
        intact: m.bonds.bonds.iter().map(|b| b.intact).collect(),
        pd_alpha: m.pd_alpha.alpha.clone(),
        phi: m.damage(),
        flags: m.flags.len(),
    }
}

/// First violated monotonicity between consecutive observations.
pub fn violation(before: &Observed, after: &Observed) -> Option<String> {
    if after.intact.len() < before.intact.len() {
        return Some("bond table shrank".into());
    }
    if let Some(b) = (0..before.intact.len()).find(|&b| !before.intact[b] && after.intact[b]) {
        return Some(format!("bond {b} healed"));
    }
    if let Some(p) = (0..before.pd_alpha.len()).find(|&p| after.pd_alpha[p] < before.pd_alpha[p]) {
        return Some(format!("alpha at point {p} fell {} -> {}", before.pd_alpha[p], after.pd_alpha[p]));
    }
    if let Some(e) = (0..before.phi.len()).find(|&e| after.phi[e] < before.phi[e] - 1e-12) {
        return Some(format!("phi of element {e} fell {} -> {}", before.phi[e], after.phi[e]));
    }
    if after.flags < before.flags {
        return Some("flag set shrank".into());
    }
    None
}

/// Runs one case checking every step; returns the number of broken bonds.
pub fn check_monotone(case: &Case) -> Result<usize, String> {
    let cfg = small_plate(20.0, case.notch, case.sigma);
    let (mut sim, _) = cfg.build().map_err(|e| e.to_string())?;
    let mut prev = observe(&sim);
    for _ in 0..case.steps {
        sim.step_once().map_err(|e| e.to_string())?;
        let now = observe(&sim);
        if let Some(v) = violation(&prev, &now) {
            return Err(format!("step {}: {v}", sim.step));
        }
        prev = now;
    }
    Ok(sim.model.bonds.n_broken())
}

/// Two runs of one case agree bit for bit.
pub fn check_replay(case: &Case) -> Result<(), String> {
    let cfg = small_plate(20.0, case.notch, case.sigma);
    let run = || -> Result<(Vec<f64>, Observed), String> {
        let (mut sim, _) = cfg.build().map_err(|e| e.to_string())?;
        for _ in 0..case.steps {
            sim.step_once().map_err(|e| e.to_string())?;
        }
        Ok((sim.u.clone(), observe(&sim)))
    };
    let (a, b) = (run()?, run()?);
    let same_u = a.0.len() == b.0.len() && a.0.iter().zip(&b.0).all(|(x, y)| x.to_bits() == y.to_bits());
    if !same_u || a.1 != b.1 {
        return Err("replay differs".into());
    }
    Ok(())
}
