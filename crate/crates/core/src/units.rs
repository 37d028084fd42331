//! Mapping between lattice and physical scales.
//!
//! The lattice droplet is matched to a macroscopic water droplet by equating
//! Bond numbers: Bo = drho g D^2 / gamma. Water-like constants fix the
//! physical side; the lattice side uses the measured lattice surface tension
//! and the Maxwell density contrast.

use crate::error::{CoreError, Result};
use crate::thermo::CoexistenceDensities;

/// Water-air surface tension, dyn/cm.
pub const GAMMA_PHYS: f64 = 72.0;
/// Standard gravity, cm/s^2.
pub const G_PHYS: f64 = 980.0;
/// Liquid-gas density contrast of water against air, g/cm^3.
pub const DRHO_PHYS: f64 = 1.0;

/// Dimensional bridge for one run.
#[derive(Debug, Clone, Copy)]
pub struct UnitMap {
    /// cm per lattice unit: D_phys / (2 r0).
    pub dx_phys_cm: f64,
    /// Lattice gravity magnitude producing the physical Bond number.
    pub g_lat: f64,
    /// Measured lattice surface tension used in the match.
    pub gamma_lat: f64,
    /// g/cm^3 per lattice mass unit (liquid density maps to 1 g/cm^3).
    pub rho_scale: f64,
    /// The matched Bond number.
    pub bond: f64,
}

/// Build the unit map for a droplet of physical diameter `d_phys_mm`
/// represented by `r0_lat` lattice units, under gravity `g_phys` (cm/s^2).
pub fn build_unit_map(
    d_phys_mm: f64,
    g_phys: f64,
    r0_lat: f64,
    gamma_lat: f64,
    coex: &CoexistenceDensities,
) -> Result<UnitMap> {
    if gamma_lat <= 0.0 {
        return Err(CoreError::Calibration(format!(
            "lattice surface tension must be positive, got {gamma_lat}"
        )));
    }
    if d_phys_mm < 0.0 || r0_lat <= 0.0 {
        return Err(CoreError::Config(format!(
            "invalid droplet scales d_phys={d_phys_mm} mm, r0={r0_lat}"
        )));
    }
    let d_cm = d_phys_mm / 10.0;
    let bond = DRHO_PHYS * g_phys * d_cm * d_cm / GAMMA_PHYS;
    let drho_lat = coex.rho_l - coex.rho_g;
    let d_lat = 2.0 * r0_lat;
    let g_lat = bond * gamma_lat / (drho_lat * d_lat * d_lat);
    Ok(UnitMap {
        dx_phys_cm: if r0_lat > 0.0 { d_cm / d_lat } else { 0.0 },
        g_lat,
        gamma_lat,
        rho_scale: 1.0 / coex.rho_l,
        bond,
    })
}

impl UnitMap {
    /// Bond number recomputed from the lattice side.
    pub fn bond_from_lattice(&self, r0_lat: f64, coex: &CoexistenceDensities) -> f64 {
        let d = 2.0 * r0_lat;
        (coex.rho_l - coex.rho_g) * self.g_lat * d * d / self.gamma_lat
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coex() -> CoexistenceDensities {
        CoexistenceDensities {
            rho_g: 0.0102274,
            rho_l: 8.7249337,
            p_sat: 4.418e-4,
        }
    }

    #[test]
    fn zero_diameter_means_zero_gravity() {
        let m = build_unit_map(0.0, G_PHYS, 25.0, 0.1, &coex()).unwrap();
        assert_eq!(m.g_lat, 0.0);
        assert_eq!(m.bond, 0.0);
    }

    #[test]
    fn doubling_diameter_quadruples_gravity() {
        let c = coex();
        let m1 = build_unit_map(1.0, G_PHYS, 25.0, 0.1, &c).unwrap();
        let m2 = build_unit_map(2.0, G_PHYS, 25.0, 0.1, &c).unwrap();
        assert!((m2.g_lat / m1.g_lat - 4.0).abs() < 1e-12);
    }

    #[test]
    fn bond_number_round_trip() {
        let c = coex();
        let m = build_unit_map(1.0, G_PHYS, 25.0, 0.1, &c).unwrap();
        let physical = DRHO_PHYS * G_PHYS * 0.1 * 0.1 / GAMMA_PHYS;
        assert!((m.bond - physical).abs() < 1e-10 * physical);
        let lattice = m.bond_from_lattice(25.0, &c);
        assert!((lattice - physical).abs() < 1e-10 * physical);
    }

    #[test]
    fn rejects_bad_gamma() {
        assert!(build_unit_map(1.0, G_PHYS, 25.0, 0.0, &coex()).is_err());
    }
}
