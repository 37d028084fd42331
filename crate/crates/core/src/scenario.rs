//! Experiment orchestration: initialization, gravity ramping, the run loop,
//! and the canonical experiment catalog.
//!
//! A step advances through fixed phases, each a full pass over the grid:
//! solid density fill, chemical-potential field, force evaluation fused with
//! the MRT collision, streaming, boundary reconstruction, and the macroscopic
//! moment update. Every phase only reads fields written by earlier phases, so
//! each one parallelizes over disjoint node ranges with a barrier in between;
//! the sequential loop here realizes the same ordering.

use crate::error::{CoreError, Result};
use crate::grid::{Grid, NodeKind};
use crate::lattice::{
    edm_forcing, equilibrium, LatticeField, MrtOperator, RelaxationSettings, CS2, Q,
};
use crate::measure::{extract_interface, AnglePair, EquilibriumReference, HysteresisTracker};
use crate::thermo::{deriv4, maxwell_coexistence, second4, CoexistenceDensities, ThermoParams};
use crate::wall::{
    assign_solid_mu_with_floor, classify_nodes_with_floor, reconstruct_missing,
    solid_density_fill, NodeClassification, Substrate,
};

/// Body-force schedule: zero before `ramp_start`, linear to full strength
/// over `ramp_steps`, constant after. The vector is tilted by the substrate
/// slope so the geometry itself stays axis-aligned.
#[derive(Debug, Clone, Copy)]
pub struct GravitySchedule {
    pub g_lat: f64,
    pub slope_deg: f64,
    pub ramp_start: u64,
    pub ramp_steps: u64,
}

impl GravitySchedule {
    pub fn none() -> Self {
        Self {
            g_lat: 0.0,
            slope_deg: 0.0,
            ramp_start: 0,
            ramp_steps: 1,
        }
    }

    pub fn vector_at(&self, step: u64) -> [f64; 2] {
        if self.g_lat == 0.0 {
            return [0.0, 0.0];
        }
        let m = if step < self.ramp_start {
            0.0
        } else if self.ramp_steps == 0 || step >= self.ramp_start + self.ramp_steps {
            1.0
        } else {
            (step - self.ramp_start) as f64 / self.ramp_steps as f64
        };
        let g = m * self.g_lat;
        let a = self.slope_deg.to_radians();
        [g * a.sin(), -g * a.cos()]
    }
}

/// Full description of one simulation run in lattice units. Gravity is
/// already resolved to a lattice magnitude (see [`crate::units`]); the
/// physical diameter is carried along for reporting only.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub nx: usize,
    pub ny: usize,
    pub t_r: f64,
    pub relax: RelaxationSettings,
    pub kappa_hat: f64,
    pub k_scale: f64,
    /// Initial droplet radius; zero means a uniform gas field.
    pub radius: f64,
    pub center: [f64; 2],
    /// Initial interface width of the tanh profile.
    pub width: f64,
    pub substrate: Option<Substrate>,
    /// Auxiliary flat floor closing the domain below an overhead substrate.
    pub floor_level: Option<f64>,
    /// Wetting potential of the floor; defaults to the coexistence value.
    pub floor_mu: Option<f64>,
    pub gravity: GravitySchedule,
    pub d_phys_mm: Option<f64>,
    pub steps: u64,
    pub measure_every: u64,
    pub snapshot_every: u64,
}

impl ScenarioConfig {
    pub fn quiescent(name: &str, nx: usize, ny: usize, t_r: f64) -> Self {
        Self {
            name: name.to_string(),
            nx,
            ny,
            t_r,
            relax: RelaxationSettings::default(),
            kappa_hat: crate::thermo::KAPPA_HAT_DEFAULT,
            k_scale: crate::thermo::K_SCALE_DEFAULT,
            radius: 0.0,
            center: [nx as f64 / 2.0, ny as f64 / 2.0],
            width: 10.0,
            substrate: None,
            floor_level: None,
            floor_mu: None,
            gravity: GravitySchedule::none(),
            d_phys_mm: None,
            steps: 1000,
            measure_every: 0,
            snapshot_every: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 5 || self.ny < 5 {
            return Err(CoreError::Config("grid dimensions below 5".into()));
        }
        if self.width < 4.0 {
            return Err(CoreError::Config(format!(
                "interface width {} below the resolvable minimum 4",
                self.width
            )));
        }
        if self.radius > 0.0 && self.radius < 3.0 * self.width {
            return Err(CoreError::Config(format!(
                "droplet radius {} below 3 interface widths ({})",
                self.radius,
                3.0 * self.width
            )));
        }
        if let Some(sub) = &self.substrate {
            sub.validate()?;
        }
        Ok(())
    }
}

/// Density field of Eq.-style tanh initialization: gas everywhere, liquid
/// inside the droplet, mean density exactly on the r = r0 circle.
pub fn init_density(
    cfg: &ScenarioConfig,
    coex: &CoexistenceDensities,
    kind: &[NodeKind],
    grid: Grid,
) -> Result<Vec<f64>> {
    let mut rho = grid.scalar_filled(coex.rho_g);
    if cfg.radius > 0.0 {
        let mut solid_overlap = 0usize;
        let mut total_inside = 0usize;
        for y in 0..grid.ny {
            for x in 0..grid.nx {
                let idx = grid.idx(x, y);
                let r = ((x as f64 - cfg.center[0]).powi(2)
                    + (y as f64 - cfg.center[1]).powi(2))
                .sqrt();
                rho[idx] = 0.5 * (coex.rho_g + coex.rho_l)
                    + 0.5 * (coex.rho_g - coex.rho_l) * ((2.0 * (r - cfg.radius)) / cfg.width).tanh();
                if r < cfg.radius {
                    total_inside += 1;
                    if kind[idx].is_solid() {
                        solid_overlap += 1;
                    }
                }
            }
        }
        if total_inside > 0 && solid_overlap * 2 > total_inside {
            return Err(CoreError::Config(format!(
                "droplet overlaps solid on {solid_overlap}/{total_inside} of its area"
            )));
        }
    }
    Ok(rho)
}

/// One multiphase lattice Boltzmann simulation with its full state.
pub struct Simulation {
    pub grid: Grid,
    pub cfg: ScenarioConfig,
    pub thermo: ThermoParams,
    pub coex: CoexistenceDensities,
    pub lat: LatticeField,
    pub kind: Vec<NodeKind>,
    pub cls: Option<NodeClassification>,
    pub rho: Vec<f64>,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    pub fx: Vec<f64>,
    pub fy: Vec<f64>,
    pub mu: Vec<f64>,
    mrt: MrtOperator,
    pub step: u64,
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = Grid::new(cfg.nx, cfg.ny);
        let thermo = ThermoParams::with(
            crate::thermo::A_DEFAULT,
            crate::thermo::B_DEFAULT,
            crate::thermo::R_DEFAULT,
            crate::thermo::OMEGA_WATER,
            cfg.kappa_hat,
            cfg.k_scale,
            cfg.t_r,
        )?;
        let coex = maxwell_coexistence(&thermo)?;
        let (cls, kind) = match &cfg.substrate {
            Some(sub) => {
                let cls = classify_nodes_with_floor(grid, sub, cfg.floor_level)?;
                let kind = cls.kind.clone();
                (Some(cls), kind)
            }
            None => (None, vec![NodeKind::Fluid; grid.len()]),
        };
        let mut rho = init_density(cfg, &coex, &kind, grid)?;
        if let Some(cls) = &cls {
            solid_density_fill(&mut rho, cls)?;
        }
        let mut mu = grid.scalar();
        if let (Some(cls), Some(sub)) = (&cls, &cfg.substrate) {
            let mu_coex = thermo.k2() * thermo.mu0(coex.rho_g);
            let floor = cfg
                .floor_level
                .map(|l| (l, cfg.floor_mu.unwrap_or(mu_coex)));
            assign_solid_mu_with_floor(&mut mu, cls, sub, floor);
        }
        let mut lat = LatticeField::new(grid);
        let zero = grid.scalar();
        lat.init_equilibrium(&rho, &zero, &zero);
        let mrt = MrtOperator::new(&cfg.relax)?;
        Ok(Self {
            grid,
            cfg: cfg.clone(),
            thermo,
            coex,
            lat,
            kind,
            cls,
            ux: grid.scalar(),
            uy: grid.scalar(),
            fx: grid.scalar(),
            fy: grid.scalar(),
            mu,
            rho,
            mrt,
            step: 0,
        })
    }

    /// Advance one time step. On divergence the error carries the first bad
    /// node; the field state remains inspectable.
    pub fn advance(&mut self) -> Result<()> {
        if let Some(cls) = &self.cls {
            solid_density_fill(&mut self.rho, cls)?;
        }
        self.mu_pass()?;
        self.collide_pass();
        self.lat.stream();
        if let Some(cls) = &self.cls {
            reconstruct_missing(&mut self.lat, cls);
        }
        self.moments_pass()?;
        self.step += 1;
        Ok(())
    }

    /// Mesh-space chemical potential on fluid nodes; solid nodes keep their
    /// assigned wetting values.
    fn mu_pass(&mut self) -> Result<()> {
        let grid = self.grid;
        let (nx, ny) = (grid.nx, grid.ny);
        let k2 = self.thermo.k2();
        let kap = self.thermo.kappa_hat;
        let rho_max = self.thermo.rho_max();
        let rho = &self.rho;
        let kind = &self.kind;
        let th = &self.thermo;
        let mu = &mut self.mu;
        for y in 0..ny {
            let row = y * nx;
            let rm1 = grid.wrap_y(y as i64 - 1) * nx;
            let rm2 = grid.wrap_y(y as i64 - 2) * nx;
            let rp1 = grid.wrap_y(y as i64 + 1) * nx;
            let rp2 = grid.wrap_y(y as i64 + 2) * nx;
            for x in 0..nx {
                let idx = row + x;
                if kind[idx] != NodeKind::Fluid {
                    continue;
                }
                let r0 = rho[idx];
                if !(r0 > 0.0 && r0 < rho_max) {
                    return Err(CoreError::Diverged {
                        x,
                        y,
                        step: self.step,
                        what: format!("density {r0} left the EOS domain"),
                    });
                }
                let (xm2, xm1, xp1, xp2) = wrap_x4(grid, x);
                let lap = second4(ld(rho, row + xm2), ld(rho, row + xm1), r0, ld(rho, row + xp1), ld(rho, row + xp2))
                    + second4(ld(rho, rm2 + x), ld(rho, rm1 + x), r0, ld(rho, rp1 + x), ld(rho, rp2 + x));
                mu[idx] = k2 * th.mu0(r0) - kap * lap;
            }
        }
        Ok(())
    }

    /// Nonideal force (plus gravity) evaluated per node, folded directly into
    /// the exact-difference forcing and the MRT collision.
    fn collide_pass(&mut self) {
        let grid = self.grid;
        let (nx, ny) = (grid.nx, grid.ny);
        let nn = grid.len();
        let g = self.cfg.gravity.vector_at(self.step);
        let rho = &self.rho;
        let mu = &self.mu;
        let kind = &self.kind;
        let (f, post) = (&self.lat.f, &mut self.lat.post);
        for y in 0..ny {
            let row = y * nx;
            let rm1 = grid.wrap_y(y as i64 - 1) * nx;
            let rm2 = grid.wrap_y(y as i64 - 2) * nx;
            let rp1 = grid.wrap_y(y as i64 + 1) * nx;
            let rp2 = grid.wrap_y(y as i64 + 2) * nx;
            for x in 0..nx {
                let idx = row + x;
                if kind[idx] != NodeKind::Fluid {
                    continue;
                }
                let r0 = rho[idx];
                let (xm2, xm1, xp1, xp2) = wrap_x4(grid, x);
                let gmx = deriv4(ld(mu, row + xm2), ld(mu, row + xm1), ld(mu, row + xp1), ld(mu, row + xp2));
                let gmy = deriv4(ld(mu, rm2 + x), ld(mu, rm1 + x), ld(mu, rp1 + x), ld(mu, rp2 + x));
                let grx = deriv4(ld(rho, row + xm2), ld(rho, row + xm1), ld(rho, row + xp1), ld(rho, row + xp2));
                let gry = deriv4(ld(rho, rm2 + x), ld(rho, rm1 + x), ld(rho, rp1 + x), ld(rho, rp2 + x));
                let fx = -r0 * gmx + CS2 * grx + r0 * g[0];
                let fy = -r0 * gmy + CS2 * gry + r0 * g[1];
                self.fx[idx] = fx;
                self.fy[idx] = fy;

                let (ux, uy) = (self.ux[idx], self.uy[idx]);
                let fnode = gather9(f, nn, idx);
                let feq = equilibrium(r0, ux, uy);
                let forcing = edm_forcing(r0, ux, uy, fx, fy);
                let out = self.mrt.collide_with_eq(&fnode, &feq, &forcing);
                scatter9(post, nn, idx, &out);
            }
        }
    }

    /// Macroscopic moments of the freshly streamed populations, with the
    /// divergence guard.
    fn moments_pass(&mut self) -> Result<()> {
        let grid = self.grid;
        let nn = grid.len();
        let f = &self.lat.f;
        for idx in 0..nn {
            if self.kind[idx] != NodeKind::Fluid {
                continue;
            }
            let v = gather9(f, nn, idx);
            let r = v.iter().sum::<f64>();
            let jx = (v[1] - v[3]) + (v[5] - v[7]) - (v[6] - v[8]);
            let jy = (v[2] - v[4]) + (v[5] - v[7]) + (v[6] - v[8]);
            if !(r > 0.0) || !r.is_finite() {
                let (x, y) = grid.coords(idx);
                return Err(CoreError::Diverged {
                    x,
                    y,
                    step: self.step,
                    what: format!("density {r}"),
                });
            }
            let ux = jx / r;
            let uy = jy / r;
            if ux * ux + uy * uy > 0.49 {
                let (x, y) = grid.coords(idx);
                return Err(CoreError::Diverged {
                    x,
                    y,
                    step: self.step,
                    what: format!("velocity ({ux}, {uy}) beyond the stability guard"),
                });
            }
            self.rho[idx] = r;
            self.ux[idx] = ux;
            self.uy[idx] = uy;
        }
        Ok(())
    }

    /// Force-corrected velocity v = u + F/(2 rho) at a node.
    pub fn corrected_velocity(&self, idx: usize) -> [f64; 2] {
        let r = self.rho[idx];
        [
            self.ux[idx] + 0.5 * self.fx[idx] / r,
            self.uy[idx] + 0.5 * self.fy[idx] / r,
        ]
    }

    /// Total fluid mass (diagnostic).
    pub fn fluid_mass(&self) -> f64 {
        let nn = self.grid.len();
        let mut total = 0.0;
        for idx in 0..nn {
            if self.kind[idx] == NodeKind::Fluid {
                for i in 0..Q {
                    total += self.lat.f[i * nn + idx];
                }
            }
        }
        total
    }

    pub fn interface(&self) -> Result<crate::measure::InterfaceCurve> {
        extract_interface(&self.rho, &self.kind, self.grid, self.coex.rho_g, self.coex.rho_l)
    }
}

/// Unchecked load; all indices in the hot passes are wrap-constructed and
/// provably in range.
#[inline(always)]
fn ld(a: &[f64], i: usize) -> f64 {
    debug_assert!(i < a.len());
    unsafe { *a.get_unchecked(i) }
}

#[inline(always)]
fn gather9(f: &[f64], nn: usize, idx: usize) -> [f64; Q] {
    debug_assert!(idx < nn && f.len() == Q * nn);
    std::array::from_fn(|i| unsafe { *f.get_unchecked(i * nn + idx) })
}

#[inline(always)]
fn scatter9(f: &mut [f64], nn: usize, idx: usize, v: &[f64; Q]) {
    debug_assert!(idx < nn && f.len() == Q * nn);
    for i in 0..Q {
        unsafe {
            *f.get_unchecked_mut(i * nn + idx) = v[i];
        }
    }
}

#[inline(always)]
fn wrap_x4(grid: Grid, x: usize) -> (usize, usize, usize, usize) {
    let nx = grid.nx;
    if x >= 2 && x + 2 < nx {
        (x - 2, x - 1, x + 1, x + 2)
    } else {
        (
            grid.wrap_x(x as i64 - 2),
            grid.wrap_x(x as i64 - 1),
            grid.wrap_x(x as i64 + 1),
            grid.wrap_x(x as i64 + 2),
        )
    }
}

/// Observer hooks for streaming run output.
pub trait RunHooks {
    fn on_snapshot(&mut self, _sim: &Simulation) {}
    fn on_measurement(&mut self, _pair: &AnglePair, _sim: &Simulation) {}
}

/// No-op hooks.
pub struct NoHooks;
impl RunHooks for NoHooks {}

/// Everything a finished (or diverged) run leaves behind.
pub struct RunReport {
    pub name: String,
    pub steps_completed: u64,
    pub diverged: Option<String>,
    pub pairs: Vec<AnglePair>,
    pub detach_step: Option<u64>,
    pub grid: Grid,
    pub coex: CoexistenceDensities,
    pub kind: Vec<NodeKind>,
    pub final_rho: Vec<f64>,
    pub mass_initial: f64,
    pub mass_final: f64,
    pub t_r: f64,
}

impl RunReport {
    /// Mean measured angle of the last `n` samples on both sides.
    pub fn settled_theta(&self, n: usize) -> Option<f64> {
        let mut vals = Vec::new();
        for pair in self.pairs.iter().rev() {
            for s in [&pair.advancing, &pair.receding] {
                if let Some(s) = s {
                    vals.push(s.theta_deg);
                }
            }
            if vals.len() >= 2 * n {
                break;
            }
        }
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }
}

/// Drive one scenario to completion. Divergence stops the loop and is
/// reported, not propagated: sweeps must survive individual failures.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    eq: Option<&EquilibriumReference>,
    hooks: &mut dyn RunHooks,
) -> Result<RunReport> {
    let mut sim = Simulation::new(cfg)?;
    let downslope_positive = cfg.gravity.slope_deg >= 0.0;
    let mut tracker = HysteresisTracker::new(downslope_positive);
    let mass_initial = sim.fluid_mass();
    let mut pairs = Vec::new();
    let mut detach_step = None;
    let mut had_contact = false;
    let mut diverged = None;

    for _ in 0..cfg.steps {
        if let Err(e) = sim.advance() {
            diverged = Some(e.to_string());
            break;
        }
        if cfg.measure_every > 0 && sim.step % cfg.measure_every == 0 {
            if let (Some(sub), Ok(curve)) = (&cfg.substrate, sim.interface()) {
                let pair = tracker.observe(sim.step, &curve, sub, cfg.nx, eq);
                if !pair.is_empty() {
                    had_contact = true;
                } else if had_contact && detach_step.is_none() {
                    detach_step = Some(sim.step);
                }
                hooks.on_measurement(&pair, &sim);
                pairs.push(pair);
            }
        }
        if cfg.snapshot_every > 0 && sim.step % cfg.snapshot_every == 0 {
            hooks.on_snapshot(&sim);
        }
    }

    Ok(RunReport {
        name: cfg.name.clone(),
        steps_completed: sim.step,
        diverged,
        pairs,
        detach_step,
        grid: sim.grid,
        coex: sim.coex,
        kind: sim.kind.clone(),
        final_rho: sim.rho.clone(),
        mass_initial,
        mass_final: sim.fluid_mass(),
        t_r: cfg.t_r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gravity_ramp_profile() {
        let g = GravitySchedule {
            g_lat: 2e-6,
            slope_deg: 0.0,
            ramp_start: 100,
            ramp_steps: 200,
        };
        assert_eq!(g.vector_at(0), [0.0, 0.0]);
        assert_eq!(g.vector_at(99), [0.0, 0.0]);
        let half = g.vector_at(200);
        assert!((half[1] + 1e-6).abs() < 1e-18);
        let full = g.vector_at(1000);
        assert!((full[1] + 2e-6).abs() < 1e-18);
        // Slope tilts the vector.
        let g = GravitySchedule {
            slope_deg: 20.0,
            ..g
        };
        let v = g.vector_at(1000);
        assert!(v[0] > 0.0 && v[1] < 0.0);
        let mag = (v[0] * v[0] + v[1] * v[1]).sqrt();
        assert!((mag - 2e-6).abs() < 1e-18);
    }

    #[test]
    fn init_density_profile_values() {
        let mut cfg = ScenarioConfig::quiescent("t", 128, 128, 0.6);
        cfg.radius = 30.0;
        cfg.width = 6.0;
        cfg.center = [64.0, 64.0];
        let thermo = ThermoParams::new(0.6).unwrap();
        let coex = maxwell_coexistence(&thermo).unwrap();
        let grid = Grid::new(128, 128);
        let kind = vec![NodeKind::Fluid; grid.len()];
        let rho = init_density(&cfg, &coex, &kind, grid).unwrap();
        // Center is liquid, far corner is gas, the r = r0 circle is the mean.
        assert!((rho[grid.idx(64, 64)] - coex.rho_l).abs() < 1e-6 * coex.rho_l);
        assert!((rho[grid.idx(0, 0)] - coex.rho_g).abs() < 1e-4 * coex.rho_l);
        let on_ring = rho[grid.idx(94, 64)]; // r = 30 exactly
        assert!((on_ring - coex.rho_mean()).abs() < 1e-9);
        // Integrated liquid mass close to the two-bulk estimate.
        let total: f64 = rho.iter().sum();
        let area = std::f64::consts::PI * 900.0;
        let expect = area * coex.rho_l + (grid.len() as f64 - area) * coex.rho_g;
        assert!(
            (total - expect).abs() < 0.02 * expect,
            "mass {total} vs estimate {expect}"
        );
    }

    #[test]
    fn quiescent_gas_is_a_fixed_point() {
        let mut cfg = ScenarioConfig::quiescent("fixed-point", 32, 24, 0.7);
        cfg.steps = 1000;
        let mut sim = Simulation::new(&cfg).unwrap();
        let rho0 = sim.rho.clone();
        let f0 = sim.lat.f.clone();
        for _ in 0..1000 {
            sim.advance().unwrap();
        }
        for idx in 0..sim.grid.len() {
            assert!((sim.rho[idx] - rho0[idx]).abs() < 1e-12);
            assert!(sim.ux[idx].abs() < 1e-12 && sim.uy[idx].abs() < 1e-12);
        }
        for (a, b) in sim.lat.f.iter().zip(f0.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_droplet_conserves_mass_and_momentum() {
        let mut cfg = ScenarioConfig::quiescent("drop-conservation", 96, 96, 0.7);
        cfg.radius = 24.0;
        cfg.width = 6.0;
        cfg.center = [48.0, 48.0];
        cfg.steps = 0;
        let mut sim = Simulation::new(&cfg).unwrap();
        let m0 = sim.fluid_mass();
        for _ in 0..2000 {
            sim.advance().unwrap();
        }
        let m1 = sim.fluid_mass();
        assert!(
            ((m1 - m0) / m0).abs() < 1e-10,
            "mass drift {}",
            (m1 - m0) / m0
        );
        // Global momentum stays at zero by symmetry of the forcing.
        let nn = sim.grid.len();
        let mut jx = 0.0;
        let mut jy = 0.0;
        for idx in 0..nn {
            jx += sim.rho[idx] * sim.ux[idx];
            jy += sim.rho[idx] * sim.uy[idx];
        }
        assert!(jx.abs() / m0 < 1e-10 && jy.abs() / m0 < 1e-10, "momentum ({jx}, {jy})");
    }

    #[test]
    fn config_validation_catches_bad_width() {
        let mut cfg = ScenarioConfig::quiescent("bad", 64, 64, 0.6);
        cfg.width = 2.0;
        assert!(matches!(Simulation::new(&cfg), Err(CoreError::Config(_))));
        cfg.width = 10.0;
        cfg.radius = 20.0; // below 3 W
        assert!(matches!(Simulation::new(&cfg), Err(CoreError::Config(_))));
    }
}
