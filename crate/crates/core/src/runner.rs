//! Runs a scenario end to end: build, time loop, tips, files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;

use crate::adaptivity::CriterionMode;
use crate::config::{Resolved, ScenarioConfig};
use crate::crack::{crack_speed, element_neighbours, extract_with, TipSample};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::integrator::{ConversionRecord, Simulation};
use crate::output::{crack_row, timing_row, Csv, Snapshot, Writer, CRACK_HEADER, TIMING_HEADER};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Output directory; `None` runs without writing files.
    pub out: Option<PathBuf>,
    pub max_steps: Option<usize>,
    pub criterion: Option<CriterionMode>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub name: String,
    pub steps: usize,
    pub t_end: f64,
    pub wall_s: f64,
    pub n_dofs: usize,
    pub initial_pd_dofs: usize,
    pub pd_dofs: usize,
    pub total_broken: usize,
    /// Step and bond midpoint of the first failure.
    pub first_break: Option<(usize, Vec2)>,
    /// Step, element and centroid of the first runtime flag.
    pub first_flag: Option<(usize, usize, Vec2)>,
    /// Largest tip count over the output samples.
    pub max_tips: usize,
    pub crack_series: Vec<TipSample>,
    pub conversions: Vec<ConversionRecord>,
}

pub struct Run {
    pub summary: RunSummary,
    pub sim: Simulation,
    pub resolved: Resolved,
}

fn create_dir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

/// Runs `cfg` for its full duration (or `max_steps`).
///
/// With an output directory this writes `resolved.toml`, `timing.csv`
/// (every step), `crack_series.csv`, `events.log` and, when enabled,
/// `snap_NNNNNN.vtk` every `output.every` steps plus the first and last.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Run> {
    let mut cfg = cfg.clone();
    if let Some(mode) = opts.criterion {
        cfg.criterion.mode = mode;
    }
    let t0 = Instant::now();
    let (mut sim, resolved) = cfg.build()?;
    let n_steps = opts.max_steps.map_or(resolved.n_steps, |m| m.min(resolved.n_steps));
    let seeds = cfg.crack_seeds();
    let nbr = element_neighbours(&sim.model.mesh);
    let r_tip = 2.0 * resolved.delta;
    let every = cfg.output.every;
    let threshold = cfg.output.phi_threshold;

    let writer = opts.out.as_ref().map(|_| Writer::spawn(4));
    let mut timing = None;
    let mut events = Vec::new();
    if let (Some(dir), Some(w)) = (&opts.out, &writer) {
        create_dir(dir)?;
        w.text(dir.join("resolved.toml"), cfg.resolved_echo(&resolved))?;
        timing = Some(Csv::create(&dir.join("timing.csv"), TIMING_HEADER)?);
        if cfg.output.snapshots {
            w.snapshot(dir.join("snap_000000.vtk"), Snapshot::capture(&sim, &cfg.name))?;
        }
    }
    info!(
        "{}: {} nodes, {} elements, δ = {} mm, Δt = {:e} s, {} steps",
        cfg.name, resolved.n_nodes, resolved.n_elements, resolved.delta, resolved.dt, n_steps
    );
    let initial_pd_dofs = sim.model.pd_dofs();
    let mut samples: Vec<(usize, f64, Vec<Vec2>)> = Vec::new();
    let mut conversions = Vec::new();
    let mut first_flag = None;
    let mut max_tips = 0;
    let mut last_tips = 0;

    let result = sim.run(n_steps, |s, i| {
        if let Some(t) = timing.as_mut() {
            t.line(&timing_row(i))?;
        }
        if i.newly_broken > 0 && i.total_broken == i.newly_broken {
            if let Some((_, p)) = s.first_break {
                events.push(format!("{} {:e} first_break x={} y={}", i.step, i.t, p.x, p.y));
            }
        }
        if first_flag.is_none() {
            if let Some((e, c)) = s.first_flag {
                first_flag = Some((i.step, e, c));
                events.push(format!("{} {:e} first_flag element={} x={} y={}", i.step, i.t, e, c.x, c.y));
            }
        }
        if let Some(c) = &i.conversion {
            events.push(format!(
                "{} {:e} convert elements={} dofs={} mass_drift={:e} site_jump={:e}",
                c.step,
                i.t,
                c.elements,
                c.n_dofs_after,
                (c.mass_after - c.mass_before) / c.mass_before,
                c.max_site_jump
            ));
            conversions.push(c.clone());
        }
        info!(
            "step {} t={:.3}us dofs={} pd={} broken={} flags={} {:.1}ms",
            i.step,
            i.t * 1e6,
            i.n_dofs,
            i.pd_dofs,
            i.total_broken,
            s.model.flags.len(),
            i.wall_ms
        );
        let last = i.step == n_steps;
        if i.step % every == 0 || last {
            let phi = s.model.damage();
            let tips = extract_with(&phi, &s.model.mesh, &nbr, threshold, &seeds, r_tip);
            max_tips = max_tips.max(tips.len());
            if tips.len() != last_tips {
                events.push(format!("{} {:e} tips {}", i.step, i.t, tips.len()));
                last_tips = tips.len();
            }
            samples.push((i.step, i.t, tips.iter().map(|t| t.position).collect()));
            if let (Some(dir), Some(w)) = (&opts.out, &writer) {
                if cfg.output.snapshots {
                    w.snapshot(dir.join(format!("snap_{:06}.vtk", i.step)), Snapshot::capture(s, &cfg.name))?;
                }
            }
        }
        Ok(())
    });
    if let Err(e) = &result {
        events.push(format!("{} {:e} abort {e}", sim.step, sim.t));
    }
    let crack_series = crack_speed(&samples, r_tip);
    if let (Some(dir), Some(w)) = (&opts.out, writer) {
        let mut c = Csv::create(&dir.join("crack_series.csv"), CRACK_HEADER)?;
        for s in &crack_series {
            c.line(&crack_row(s))?;
        }
        c.flush()?;
        if let Some(t) = timing.as_mut() {
            t.flush()?;
        }
        let mut log = events.join("\n");
        log.push('\n');
        w.text(dir.join("events.log"), log)?;
        w.finish()?;
    }
    result?;
    let summary = RunSummary {
        name: cfg.name.clone(),
        steps: sim.step,
        t_end: sim.t,
        wall_s: t0.elapsed().as_secs_f64(),
        n_dofs: sim.n_dofs(),
        initial_pd_dofs,
        pd_dofs: sim.model.pd_dofs(),
        total_broken: sim.model.bonds.n_broken(),
        first_break: sim.first_break,
        first_flag,
        max_tips,
        crack_series,
        conversions,
    };
    info!(
        "{}: {} steps in {:.1}s, {} PD dofs of {}, {} broken bonds, max {} tips",
        summary.name, summary.steps, summary.wall_s, summary.pd_dofs, summary.n_dofs, summary.total_broken, max_tips
    );
    Ok(Run {
        summary,
        sim,
        resolved,
    })
}
