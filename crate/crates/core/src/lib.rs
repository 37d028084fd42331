//! Two-dimensional multiphase lattice Boltzmann solver (D2Q9, MRT) with a
//! chemical-potential equation-of-state model, curved wetting substrates, and
//! in-situ geometric contact-angle measurement.
//!
//! Module map:
//! - [`lattice`]: D2Q9 storage, MRT collision, streaming, exact-difference
//!   forcing, macroscopic moments.
//! - [`thermo`]: Peng-Robinson EOS, Maxwell construction, chemical potential,
//!   fourth-order stencils, nonideal force.
//! - [`wall`]: curved substrate geometry, two-layer solid classification,
//!   wetting assignment, interpolated bounce-back with a mass audit.
//! - [`measure`]: iso-density interface extraction, contact angles on curved
//!   walls, spherical-cap reference, Cassie-Baxter, unbalanced Young's force.
//! - [`scenario`]: experiment orchestration, initialization, gravity ramp,
//!   the run loop, and the canonical experiment catalog.
//! - [`units`]: Bond-number-matched mapping between lattice and physical
//!   gravity scales.
//! - [`calibrate`]: surface-tension measurement and the wetting-potential to
//!   contact-angle calibration map.

pub mod calibrate;
pub mod catalog;
pub mod error;
pub mod grid;
pub mod lattice;
pub mod measure;
pub mod scenario;
pub mod thermo;
pub mod units;
pub mod wall;

pub use calibrate::Calibration;
pub use error::{CoreError, Result};
pub use grid::{Grid, NodeKind};
pub use lattice::{LatticeField, MrtOperator, RelaxationSettings};
pub use measure::{AngleSample, InterfaceCurve, Side};
pub use scenario::{run_scenario, RunReport, ScenarioConfig, Simulation};
pub use thermo::{CoexistenceDensities, ThermoParams};
pub use units::UnitMap;
pub use wall::{NodeClassification, Substrate, SurfaceShape, WettingPattern};
