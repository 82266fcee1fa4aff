//! Bundled benchmark configurations.
//!
//! Each benchmark has a full-resolution config and a `_desk` variant on a
//! coarser mesh. `branch_plate_strip_desk` is the fixed-strip reference for
//! `branch_plate_desk`.

use std::path::Path;

use crate::adaptivity::{CriterionMode, VonMisesForm};
use crate::assembly::{
    BoundarySelector, Component, Constraint, ExplosionLoad, LoadHistory, LoadProgram, Traction, TractionDirection,
};
use crate::config::{
    parse_pores, CriterionConfig, FlagConfig, GeometryConfig, MaterialConfig, NumericsConfig, OutputConfig,
    ScenarioConfig,
};
use crate::geometry::{Segment, Vec2};
use crate::mesh::{Circle, Outline, PdQuadrature};

pub use crate::assembly::{explosion_load, ramp_traction};

const PORES_31: &str = include_str!("../data/pores_31.txt");
const PORES_DESK_8: &str = include_str!("../data/pores_desk_8.txt");

pub const NAMES: [&str; 7] = [
    "branch_plate",
    "branch_plate_desk",
    "branch_plate_strip_desk",
    "blast_disk",
    "blast_disk_desk",
    "porous_plate",
    "porous_plate_desk",
];

fn glass() -> MaterialConfig {
    MaterialConfig {
        e: 72e3,
        rho: 2.44e-9,
        g0: Some(1.35e-4),
        s_crit: None,
    }
}

fn granite() -> MaterialConfig {
    MaterialConfig {
        e: 72e3,
        rho: 2.70e-9,
        g0: Some(2.217e-2),
        s_crit: None,
    }
}

fn epoxy() -> MaterialConfig {
    MaterialConfig {
        e: 3.26e3,
        rho: 1.10e-9,
        g0: None,
        s_crit: Some(0.03),
    }
}

fn bond_criterion() -> CriterionConfig {
    CriterionConfig {
        mode: CriterionMode::BrokenBond,
        sigma_crit: None,
        von_mises: VonMisesForm::Standard,
        adaptive: true,
        r_p: None,
        big_r_p: None,
    }
}

fn numerics(dx: f64, dt: f64, total_time: f64) -> NumericsConfig {
    NumericsConfig {
        dx: Some(dx),
        horizon_factor: 3.0,
        length_ratio: 15.0,
        dt: Some(dt),
        safety: 0.5,
        total_time,
        quadrature: PdQuadrature::SubCell,
    }
}

/// 100 × 100 mm glass plate, 50 mm notch up the vertical axis, σ_x = 14 MPa
/// step load on both sides.
pub fn branch_plate(dx: f64) -> ScenarioConfig {
    let traction = |side| Traction {
        region: side,
        direction: TractionDirection::Normal,
        history: LoadHistory::Constant { value: 14.0 },
    };
    ScenarioConfig {
        name: "branch_plate".into(),
        description: "pre-notched glass plate, crack branching under lateral tension".into(),
        geometry: GeometryConfig::Perforated {
            outline: Outline::Rectangle {
                lo: [0.0, 0.0],
                hi: [100.0, 100.0],
            },
            holes: vec![],
            holes_file: None,
            spacing: dx,
            mirror_x: Some(50.0),
            notches: vec![Segment::new(Vec2::new(50.0, 0.0), Vec2::new(50.0, 50.0))],
        },
        material: glass(),
        criterion: bond_criterion(),
        load: LoadProgram {
            tractions: vec![traction(BoundarySelector::Left), traction(BoundarySelector::Right)],
            body_force: None,
        },
        constraints: vec![],
        numerics: numerics(dx, 4e-8, 38.4e-6),
        output: OutputConfig::default(),
        flags: vec![FlagConfig {
            at: [50.0, 50.0],
            to: None,
            r1: 6.0,
            r2: 12.0,
        }],
    }
}

/// The same plate with a prescribed PD strip along the notch axis and no
/// runtime flags. The strip half-width is `16·dx` (8 mm at `dx = 0.5`), a
/// fixed multiple of the horizon, with a `2δ` transition.
pub fn branch_plate_strip(dx: f64) -> ScenarioConfig {
    let mut c = branch_plate(dx);
    c.name = "branch_plate_strip".into();
    c.description = "fixed PD strip reference for branch_plate".into();
    c.criterion.adaptive = false;
    c.flags = vec![FlagConfig {
        at: [50.0, 0.0],
        to: Some([50.0, 100.0]),
        r1: 16.0 * dx,
        r2: 22.0 * dx,
    }];
    c.output.seeds = vec![[50.0, 50.0]];
    c
}

/// 144 mm granite disk, 6.45 mm central hole, explosion pressure on the rim.
pub fn blast_disk(dx: f64) -> ScenarioConfig {
    let hole = Circle {
        center: [0.0, 0.0],
        radius: 6.45 / 2.0,
    };
    ScenarioConfig {
        name: "blast_disk".into(),
        description: "granite disk with a central blast hole".into(),
        geometry: GeometryConfig::Perforated {
            outline: Outline::Disk {
                center: [0.0, 0.0],
                radius: 72.0,
            },
            holes: vec![hole],
            holes_file: None,
            mirror_x: None,
            spacing: dx,
            notches: vec![],
        },
        material: granite(),
        criterion: bond_criterion(),
        load: LoadProgram {
            tractions: vec![Traction {
                region: BoundarySelector::Circle {
                    center: hole.center,
                    radius: hole.radius,
                    tol: 0.25 * dx,
                },
                direction: TractionDirection::Pressure,
                history: LoadHistory::Explosion(ExplosionLoad {
                    p0: 500.0,
                    m_u: 9e5,
                    m_d: 1e5,
                    alpha1: 1e-7,
                    alpha2: 1e-3,
                }),
            }],
            body_force: None,
        },
        constraints: vec![],
        numerics: numerics(dx, 5e-8, 50e-6),
        output: OutputConfig::default(),
        flags: vec![FlagConfig {
            at: [0.0, 0.0],
            to: None,
            r1: 6.0,
            r2: 12.0,
        }],
    }
}

fn pores(text: &str, name: &str) -> Vec<Circle> {
    parse_pores(text, Path::new(name)).expect("bundled pore file parses")
}

/// Epoxy plate with pores, ramped tension on the top edge, bottom edge
/// held vertically and its midpoint held horizontally.
fn porous(side: f64, holes: Vec<Circle>, dx: f64, sigma0: f64, dt: f64, total_time: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: "porous_plate".into(),
        description: "epoxy plate with pores under ramped tension, strength-criterion start-up".into(),
        geometry: GeometryConfig::Perforated {
            outline: Outline::Rectangle {
                lo: [0.0, 0.0],
                hi: [side, side],
            },
            holes,
            holes_file: None,
            mirror_x: None,
            spacing: dx,
            notches: vec![],
        },
        material: epoxy(),
        criterion: CriterionConfig {
            mode: CriterionMode::Strength,
            sigma_crit: Some(62.86),
            ..bond_criterion()
        },
        load: LoadProgram {
            tractions: vec![Traction {
                region: BoundarySelector::Top,
                direction: TractionDirection::Normal,
                history: LoadHistory::Ramp { sigma0, t0: 5e-6 },
            }],
            body_force: None,
        },
        constraints: vec![
            Constraint::Edges {
                region: BoundarySelector::Bottom,
                component: Component::Y,
                value: 0.0,
            },
            Constraint::Point {
                at: [side / 2.0, 0.0],
                component: Component::X,
                value: 0.0,
            },
        ],
        numerics: numerics(dx, dt, total_time),
        output: OutputConfig::default(),
        flags: vec![],
    }
}

pub fn porous_plate(dx: f64) -> ScenarioConfig {
    porous(76.2, pores(PORES_31, "pores_31.txt"), dx, 12.0, 1e-8, 20e-6)
}

pub fn porous_plate_desk() -> ScenarioConfig {
    let mut c = porous(76.2, pores(PORES_DESK_8, "pores_desk_8.txt"), 1.0, 20.0, 5e-8, 200e-6);
    c.name = "porous_plate_desk".into();
    c.description.push_str(" (desk scale)");
    c
}

/// Full-resolution configs of the three benchmarks.
pub fn builtin_scenarios() -> Vec<ScenarioConfig> {
    vec![branch_plate(0.5), blast_disk(0.5), porous_plate(0.5)]
}

pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    let mut c = match name {
        "branch_plate" => return Some(branch_plate(0.5)),
        "branch_plate_desk" => branch_plate(1.0),
        "branch_plate_strip_desk" => branch_plate_strip(1.0),
        "blast_disk" => return Some(blast_disk(0.5)),
        "blast_disk_desk" => blast_disk(1.0),
        "porous_plate" => return Some(porous_plate(0.5)),
        "porous_plate_desk" => return Some(porous_plate_desk()),
        _ => return None,
    };
    c.name = name.into();
    c.description.push_str(" (desk scale)");
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn material_blocks() {
        let b = builtin("branch_plate").unwrap();
        assert_eq!((b.material.e, b.material.rho, b.material.g0), (72e3, 2.44e-9, Some(1.35e-4)));
        assert_eq!(b.flags[0].r1, 6.0);
        assert_eq!(b.flags[0].r2, 12.0);
        let d = builtin("blast_disk").unwrap();
        assert_eq!((d.material.rho, d.material.g0), (2.70e-9, Some(2.217e-2)));
        assert_eq!((d.numerics.dt, d.numerics.total_time), (Some(5e-8), 50e-6));
        let p = builtin("porous_plate").unwrap();
        assert_eq!((p.numerics.dt, p.numerics.total_time), (Some(1e-8), 20e-6));
        assert_eq!((p.material.rho, p.material.e, p.material.s_crit), (1.10e-9, 3.26e3, Some(0.03)));
        assert_eq!(p.criterion.sigma_crit, Some(62.86));
        assert_eq!(p.holes().unwrap().len(), 31);
        assert_eq!(builtin("porous_plate_desk").unwrap().holes().unwrap().len(), 8);
        assert!(builtin("nope").is_none());
    }

    #[test]
    fn round_trip() {
        for name in NAMES {
            let c = builtin(name).unwrap();
            let back = ScenarioConfig::from_toml(&c.to_toml()).unwrap();
            assert_eq!(back, c, "{name}");
        }
    }

    #[test]
    fn desk_variants_validate() {
        for name in ["branch_plate_desk", "branch_plate_strip_desk", "porous_plate_desk"] {
            let c = builtin(name).unwrap();
            c.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn full_branch_plate_horizon() {
        let (_, r) = builtin("branch_plate").unwrap().validate().unwrap();
        assert_eq!(r.delta, 1.5);
        assert!((r.c_r / 3.10e6 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn load_shapes() {
        assert_eq!(ramp_traction(0.0, 12.0, 5e-6), 0.0);
        assert_eq!(ramp_traction(5e-6, 12.0, 5e-6), 12.0);
        assert_eq!(ramp_traction(1e-5, 12.0, 5e-6), 12.0);
        let e = ExplosionLoad {
            p0: 500.0,
            m_u: 9e5,
            m_d: 1e5,
            alpha1: 1e-7,
            alpha2: 1e-3,
        };
        assert_eq!(e.g(), 21);
        let peak = e.pressure(e.t_d()) / 500.0;
        assert!((0.99..=1.0).contains(&peak), "{peak}");
        assert!(e.pressure(0.0) / 500.0 < 1e-3);
    }
}
