//! Error types shared across the solver.

use thiserror::Error;

/// Errors produced by solver setup, thermodynamics, and the run loop.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Non-finite or out-of-range value fed to a node-level operation.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Inconsistent configuration detected at construction time.
    #[error("configuration error: {0}")]
    Config(String),

    /// Density left the EOS domain (0, 1/b) or a related thermodynamic bound.
    #[error("thermodynamic domain error: {0}")]
    Domain(String),

    /// No two-phase solution exists at the requested reduced temperature.
    #[error("no two-phase solution at reduced temperature {t_r}")]
    NoTwoPhase { t_r: f64 },

    /// An iterative solver exhausted its iteration budget.
    #[error("{what} failed to converge (residual {residual:e})")]
    NoConvergence { what: String, residual: f64 },

    /// The simulation produced a non-physical node value.
    #[error("simulation diverged at node ({x}, {y}) step {step}: {what}")]
    Diverged {
        x: usize,
        y: usize,
        step: u64,
        what: String,
    },

    /// Interface extraction found no iso-density crossings.
    #[error("single-phase field: no iso-density crossings")]
    SinglePhase,

    /// No usable near-wall interface points on the requested side.
    #[error("contact line not found on {side} side")]
    ContactLineNotFound { side: &'static str },

    /// The interface line is parallel to the substrate or otherwise unusable.
    #[error("degenerate contact-line geometry: {0}")]
    DegenerateGeometry(String),

    /// Calibration inputs missing or inconsistent.
    #[error("calibration error: {0}")]
    Calibration(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
