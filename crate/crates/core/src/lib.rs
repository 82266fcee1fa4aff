//! Adaptive peridynamic / continuum coupling for 2D explicit dynamic fracture.

pub mod error;
pub mod geometry;
pub mod integrator;
pub mod adaptivity;
pub mod cli;
pub mod assembly;
pub mod bonds;
pub mod config;
pub mod crack;
pub mod mesh;
pub mod scenarios;
pub mod morphing;
pub mod output;
pub mod runner;

pub use error::{Error, Result};
