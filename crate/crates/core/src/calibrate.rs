//! Calibration procedures: lattice surface tension from the two-dimensional
//! Laplace law, and the wetting-potential to contact-angle response measured
//! on the curved-substrate statics family.

use crate::error::{CoreError, Result};
use crate::measure::{
    cap_angle_from_interface, extract_interface, laplace_fit, linear_fit_l2, measure_contact_angle,
    EquilibriumReference, Side,
};
use crate::scenario::{run_scenario, NoHooks, RunReport, ScenarioConfig};
use crate::thermo::{maxwell_coexistence, ThermoParams};
use crate::Simulation;

/// One statics measurement: the wetting potential, the angle from the present
/// scheme, and the spherical-cap reference with its base chord and height.
#[derive(Debug, Clone, Copy)]
pub struct ThetaMuSample {
    pub mu_s: f64,
    pub theta_measured: f64,
    pub theta_cap: f64,
}

/// Linear wetting response at one reduced temperature.
#[derive(Debug, Clone)]
pub struct TemperatureCalibration {
    pub t_r: f64,
    pub samples: Vec<ThetaMuSample>,
    pub slope: f64,
    pub intercept: f64,
    pub l2_error: f64,
}

impl TemperatureCalibration {
    pub fn fit(t_r: f64, samples: Vec<ThetaMuSample>) -> Result<Self> {
        let xs: Vec<f64> = samples.iter().map(|s| s.mu_s).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.theta_measured).collect();
        let (slope, intercept, l2_error) = linear_fit_l2(&xs, &ys)?;
        Ok(Self {
            t_r,
            samples,
            slope,
            intercept,
            l2_error,
        })
    }
}

/// Measured calibration constants of the solver configuration.
#[derive(Debug, Clone)]
pub struct Calibration {
    /// Reduced temperature the surface tension was measured at.
    pub gamma_t_r: f64,
    pub gamma_lat: f64,
    pub gamma_residual: f64,
    /// (equilibrium radius, pressure jump) pairs behind the fit.
    pub laplace_points: Vec<(f64, f64)>,
    pub by_temperature: Vec<TemperatureCalibration>,
}

impl Calibration {
    pub fn temperature(&self, t_r: f64) -> Result<&TemperatureCalibration> {
        self.by_temperature
            .iter()
            .find(|c| (c.t_r - t_r).abs() < 1e-12)
            .ok_or_else(|| {
                CoreError::Calibration(format!("no wetting calibration at T_r = {t_r}"))
            })
    }

    /// Equilibrium-angle and surface-tension reference for measurement.
    pub fn reference_at(&self, t_r: f64) -> Result<EquilibriumReference> {
        let tc = self.temperature(t_r)?;
        Ok(EquilibriumReference {
            gamma: self.gamma_lat,
            theta_slope: tc.slope,
            theta_intercept: tc.intercept,
        })
    }
}

/// The equilibrium chemical potential k^2 mu0(rho_coex) at this temperature:
/// the neutral-wetting wall value (theta near 90 degrees).
pub fn mu_coex(t_r: f64) -> Result<f64> {
    let th = ThermoParams::new(t_r)?;
    let coex = maxwell_coexistence(&th)?;
    Ok(th.k2() * th.mu0(coex.rho_l))
}

/// Laplace-law surface tension: equilibrate periodic droplets at the given
/// radii, fit Delta_p = gamma / R through the origin.
///
/// The bulk relaxation modes run heavily damped here: the sharp initial
/// profile of the smallest droplet focuses an acoustic pulse at the center
/// that would otherwise push the density past the EOS ceiling. Surface
/// tension is an equilibrium property and does not depend on the rates.
pub fn measure_surface_tension(t_r: f64, radii: &[f64], steps: u64) -> Result<(f64, f64, Vec<(f64, f64)>)> {
    let th = ThermoParams::new(t_r)?;
    let mut points = Vec::new();
    for &r0 in radii {
        let n = (5.2 * r0).ceil() as usize;
        let mut cfg = ScenarioConfig::quiescent(&format!("laplace-r{r0}"), n, n, t_r);
        cfg.radius = r0;
        cfg.width = 6.0;
        cfg.center = [n as f64 / 2.0, n as f64 / 2.0];
        cfg.relax.s_e = 0.8;
        cfg.relax.s_eps = 0.8;
        cfg.steps = steps;
        let mut sim = Simulation::new(&cfg)?;
        for _ in 0..cfg.steps {
            sim.advance()?;
        }
        let grid = sim.grid;
        let c = n / 2;
        let mut rho_in = 0.0;
        let mut rho_out = 0.0;
        for dy in 0..3 {
            for dx in 0..3 {
                rho_in += sim.rho[grid.idx(c - 1 + dx, c - 1 + dy)];
                rho_out += sim.rho[grid.idx(dx, dy)];
            }
        }
        rho_in /= 9.0;
        rho_out /= 9.0;
        let dp = th.k2() * (th.p0(rho_in) - th.p0(rho_out));
        if dp <= 0.0 {
            return Err(CoreError::Calibration(format!(
                "no Laplace overpressure inside droplet r0 = {r0} (dp = {dp})"
            )));
        }
        let curve = sim.interface()?;
        let mut r_sum = 0.0;
        for p in &curve.points {
            r_sum += ((p.x - curve.centroid[0]).powi(2) + (p.y - curve.centroid[1]).powi(2)).sqrt();
        }
        points.push((r_sum / curve.points.len() as f64, dp));
    }
    let (gamma, resid) = laplace_fit(&points)?;
    if resid > 0.10 {
        return Err(CoreError::NoConvergence {
            what: "Laplace-law fit".into(),
            residual: resid,
        });
    }
    Ok((gamma, resid, points))
}

/// Measure the settled contact angle and the spherical-cap reference of a
/// finished statics run.
pub fn settled_angles(report: &RunReport, cfg: &ScenarioConfig) -> Result<(f64, f64)> {
    let sub = cfg
        .substrate
        .as_ref()
        .ok_or_else(|| CoreError::Calibration("statics run has no substrate".into()))?;
    if let Some(d) = &report.diverged {
        return Err(CoreError::Calibration(format!(
            "run {} diverged: {d}",
            report.name
        )));
    }
    // Average the last few tracked samples for the measured angle.
    let theta = report
        .settled_theta(5)
        .ok_or_else(|| CoreError::Calibration(format!("run {} produced no samples", report.name)))?;
    let curve = extract_interface(
        &report.final_rho,
        &report.kind,
        report.grid,
        report.coex.rho_g,
        report.coex.rho_l,
    )?;
    let cap = cap_angle_from_interface(&curve, sub)?;
    Ok((theta, cap))
}

/// Run the theta(mu) statics family at one temperature and fit the response.
pub fn wetting_response(
    t_r: f64,
    mu_values: &[f64],
    make_cfg: &dyn Fn(f64, f64) -> ScenarioConfig,
) -> Result<TemperatureCalibration> {
    let mut samples = Vec::new();
    for &mu_s in mu_values {
        let cfg = make_cfg(t_r, mu_s);
        let report = run_scenario(&cfg, None, &mut NoHooks)?;
        let (theta, cap) = settled_angles(&report, &cfg)?;
        samples.push(ThetaMuSample {
            mu_s,
            theta_measured: theta,
            theta_cap: cap,
        });
    }
    TemperatureCalibration::fit(t_r, samples)
}

/// Sanity measurement used by tests: the advancing-side angle of a finished
/// run's final field.
pub fn final_angle(report: &RunReport, cfg: &ScenarioConfig) -> Result<f64> {
    let sub = cfg
        .substrate
        .as_ref()
        .ok_or_else(|| CoreError::Calibration("run has no substrate".into()))?;
    let curve = extract_interface(
        &report.final_rho,
        &report.kind,
        report.grid,
        report.coex.rho_g,
        report.coex.rho_l,
    )?;
    Ok(measure_contact_angle(&curve, sub, Side::Advancing, true, None)?.theta_deg)
}
