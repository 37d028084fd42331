use capl_core::scenario::{ScenarioConfig, Simulation};
use capl_core::thermo::{maxwell_coexistence, ThermoParams};
fn main() {
    for (se, seps, tau, ny) in [(1.64, 1.54, 1.0, 6), (0.8, 0.8, 1.0, 6), (0.8, 0.8, 1.0, 8)] {
        let mut cfg = ScenarioConfig::quiescent("slab", 200, ny, 0.6);
        cfg.relax.s_e = se; cfg.relax.s_eps = seps; cfg.relax.tau = tau;
        let mut sim = Simulation::new(&cfg).unwrap();
        let th = ThermoParams::new(0.6).unwrap();
        let coex = maxwell_coexistence(&th).unwrap();
        let grid = sim.grid;
        for y in 0..ny { for x in 0..200 {
            let d = (x as f64 - 100.0).abs() - 50.0;
            sim.rho[grid.idx(x, y)] = 0.5*(coex.rho_g+coex.rho_l) - 0.5*(coex.rho_g-coex.rho_l)*(-(2.0*d)/8.0_f64).tanh();
        }}
        let r0 = sim.rho.clone();
        let zero = vec![0.0; grid.len()];
        sim.lat.init_equilibrium(&r0, &zero, &zero);
        let mut ok = true;
        for _ in 0..30000 { if sim.advance().is_err() { ok = false; break; } }
        if !ok { println!("se={se} ny={ny}: diverged"); continue; }
        let umax = sim.ux.iter().zip(sim.uy.iter()).map(|(a,b)| (a*a+b*b).sqrt()).fold(0.0f64, f64::max);
        println!("se={se} ny={ny}: u_max={umax:.2e} rho_l={:.5}", sim.rho[grid.idx(100,3)]);
    }
}
