//! Snapshot and series files.
//!
//! Snapshots are legacy VTK unstructured grids (ASCII). Formatting and disk
//! writes happen on a writer thread fed through a bounded queue, so the time
//! loop only blocks when the queue is full.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc::{sync_channel, SyncSender};
use std::thread::JoinHandle;

use crate::adaptivity::{centroid_stresses, von_mises_plane};
use crate::crack::TipSample;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::integrator::{Simulation, StepInfo};

/// Everything one snapshot file holds, detached from the simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub title: String,
    pub points: Vec<Vec2>,
    pub cells: Vec<(u8, Vec<usize>)>,
    pub displacement: Vec<Vec2>,
    pub damage: Vec<f64>,
    pub alpha: Vec<f64>,
    /// 0 continuous, 1 discrete.
    pub kind: Vec<u8>,
    pub von_mises: Vec<f64>,
}

impl Snapshot {
    pub fn capture(sim: &Simulation, name: &str) -> Snapshot {
        let m = &sim.model;
        let mesh = &m.mesh;
        let stress = centroid_stresses(mesh, &sim.u, &m.centroid_stiffness);
        Snapshot {
            title: format!("{name} step {} t {:e}", sim.step, sim.t),
            points: mesh.nodes.iter().map(|n| n.position).collect(),
            cells: mesh
                .elements
                .iter()
                .map(|e| (e.shape.vtk_cell_type(), e.nodes.clone()))
                .collect(),
            displacement: (0..mesh.nodes.len())
                .map(|n| Vec2::new(sim.u[2 * n], sim.u[2 * n + 1]))
                .collect(),
            damage: m.damage(),
            alpha: m.centroid_alpha.alpha.clone(),
            kind: mesh.elements.iter().map(|e| e.is_discrete() as u8).collect(),
            von_mises: stress
                .iter()
                .map(|s| von_mises_plane(s, sim.criterion.von_mises))
                .collect(),
        }
    }

    pub fn to_vtk(&self) -> String {
        let mut s = String::with_capacity(64 * (self.points.len() + self.cells.len()));
        let np = self.points.len();
        let nc = self.cells.len();
        let _ = writeln!(s, "# vtk DataFile Version 3.0");
        let _ = writeln!(s, "{}", self.title.replace('\n', " "));
        let _ = writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID");
        let _ = writeln!(s, "POINTS {np} double");
        for p in &self.points {
            let _ = writeln!(s, "{} {} 0", p.x, p.y);
        }
        let size: usize = self.cells.iter().map(|c| c.1.len() + 1).sum();
        let _ = writeln!(s, "CELLS {nc} {size}");
        for (_, nodes) in &self.cells {
            let _ = write!(s, "{}", nodes.len());
            for n in nodes {
                let _ = write!(s, " {n}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "CELL_TYPES {nc}");
        for (t, _) in &self.cells {
            let _ = writeln!(s, "{t}");
        }
        let _ = writeln!(s, "POINT_DATA {np}\nVECTORS displacement double");
        for d in &self.displacement {
            let _ = writeln!(s, "{} {} 0", d.x, d.y);
        }
        let _ = writeln!(s, "CELL_DATA {nc}");
        let scalars = |s: &mut String, name: &str, ty: &str, v: &mut dyn Iterator<Item = String>| {
            let _ = writeln!(s, "SCALARS {name} {ty} 1\nLOOKUP_TABLE default");
            for x in v {
                s.push_str(&x);
                s.push('\n');
            }
        };
        scalars(&mut s, "damage", "double", &mut self.damage.iter().map(|x| x.to_string()));
        scalars(&mut s, "alpha", "double", &mut self.alpha.iter().map(|x| x.to_string()));
        scalars(&mut s, "kind", "int", &mut self.kind.iter().map(|x| x.to_string()));
        scalars(&mut s, "von_mises", "double", &mut self.von_mises.iter().map(|x| x.to_string()));
        s
    }
}

/// Counts of a legacy VTK unstructured grid, read back from text.
#[derive(Debug, Clone, PartialEq)]
pub struct VtkSummary {
    pub points: usize,
    pub cells: usize,
    /// Named cell arrays in file order.
    pub cell_arrays: Vec<(String, Vec<f64>)>,
}

pub fn read_vtk(text: &str, path: &Path) -> Result<VtkSummary> {
    let bad = |line: usize, m: &str| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: m.into(),
    };
    let lines: Vec<&str> = text.lines().collect();
    if !lines.first().is_some_and(|l| l.starts_with("# vtk DataFile")) {
        return Err(bad(1, "missing VTK header"));
    }
    let count = |key: &str| -> Result<(usize, usize)> {
        let k = lines
            .iter()
            .position(|l| l.starts_with(key))
            .ok_or_else(|| bad(0, &format!("no {key} section")))?;
        let n = lines[k]
            .split_whitespace()
            .nth(1)
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| bad(k + 1, "bad count"))?;
        Ok((k, n))
    };
    let (_, points) = count("POINTS")?;
    let (_, cells) = count("CELLS")?;
    let (start, _) = count("CELL_DATA")?;
    let mut cell_arrays = Vec::new();
    let mut k = start + 1;
    while k < lines.len() {
        let head: Vec<&str> = lines[k].split_whitespace().collect();
        if head.first() != Some(&"SCALARS") || head.len() < 2 {
            return Err(bad(k + 1, "expected SCALARS"));
        }
        let vals = lines
            .get(k + 2..k + 2 + cells)
            .ok_or_else(|| bad(k + 1, "truncated cell array"))?
            .iter()
            .enumerate()
            .map(|(j, l)| l.trim().parse::<f64>().map_err(|_| bad(k + 3 + j, "bad value")))
            .collect::<Result<Vec<_>>>()?;
        cell_arrays.push((head[1].to_string(), vals));
        k += 2 + cells;
    }
    Ok(VtkSummary {
        points,
        cells,
        cell_arrays,
    })
}

pub fn write_snapshot(snap: &Snapshot, path: &Path) -> Result<()> {
    std::fs::write(path, snap.to_vtk()).map_err(|e| Error::io(path, e))
}

enum Job {
    Snapshot(PathBuf, Box<Snapshot>),
    Text(PathBuf, String),
}

/// Background writer; `finish` joins it and reports the first failure.
pub struct Writer {
    tx: Option<SyncSender<Job>>,
    handle: Option<JoinHandle<Result<()>>>,
}

impl Writer {
    /// Senders block once `bound` jobs are queued.
    pub fn spawn(bound: usize) -> Writer {
        let (tx, rx) = sync_channel::<Job>(bound);
        let handle = std::thread::spawn(move || {
            let mut first_err = None;
            for job in rx {
                let r = match job {
                    Job::Snapshot(p, s) => write_snapshot(&s, &p),
                    Job::Text(p, t) => std::fs::write(&p, t).map_err(|e| Error::io(&p, e)),
                };
                if let (Err(e), None) = (r, &first_err) {
                    first_err = Some(e);
                }
            }
            first_err.map_or(Ok(()), Err)
        });
        Writer {
            tx: Some(tx),
            handle: Some(handle),
        }
    }

    fn send(&self, job: Job) -> Result<()> {
        self.tx
            .as_ref()
            .expect("writer is open")
            .send(job)
            .map_err(|_| Error::Consistency("snapshot writer stopped".into()))
    }

    pub fn snapshot(&self, path: PathBuf, snap: Snapshot) -> Result<()> {
        self.send(Job::Snapshot(path, Box::new(snap)))
    }

    pub fn text(&self, path: PathBuf, text: String) -> Result<()> {
        self.send(Job::Text(path, text))
    }

    pub fn finish(mut self) -> Result<()> {
        self.close()
    }

    fn close(&mut self) -> Result<()> {
        drop(self.tx.take());
        match self.handle.take() {
            Some(h) => h
                .join()
                .map_err(|_| Error::Consistency("snapshot writer panicked".into()))?,
            None => Ok(()),
        }
    }
}

impl Drop for Writer {
    fn drop(&mut self) {
        let _ = self.close();
    }
}

/// Buffered CSV file with a fixed header.
pub struct Csv {
    path: PathBuf,
    out: BufWriter<File>,
}

impl Csv {
    pub fn create(path: &Path, header: &str) -> Result<Csv> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut c = Csv {
            path: path.to_path_buf(),
            out: BufWriter::new(f),
        };
        c.line(header)?;
        Ok(c)
    }

    pub fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.out, "{s}").map_err(|e| Error::io(&self.path, e))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn timing_row(i: &StepInfo) -> String {
    format!("{},{:e},{},{},{:.3}", i.step, i.t, i.n_dofs, i.total_broken, i.wall_ms)
}

pub fn crack_row(s: &TipSample) -> String {
    let v = s.speed.map_or(String::new(), |v| format!("{v:e}"));
    format!("{},{:e},{},{},{},{}", s.step, s.t, s.tip_id, s.position.x, s.position.y, v)
}

pub const TIMING_HEADER: &str = "step,t,n_dofs,n_broken,wall_ms";
pub const CRACK_HEADER: &str = "step,t,tip_id,x,y,v_c";
