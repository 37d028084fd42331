use capl_core::calibrate::{mu_coex, settled_angles};
use capl_core::catalog;
use capl_core::scenario::{run_scenario, NoHooks};
use std::time::Instant;
fn main() {
    for t_r in [0.6, 0.8] {
        let c = mu_coex(t_r).unwrap();
        let scale = if t_r > 0.7 { 0.45 } else { 1.0 };
        let t0 = Instant::now();
        for dmu in [-0.045, -0.02, 0.0, 0.025, 0.055, 0.085] {
            let mu = c + dmu * scale;
            let mut cfg = catalog::statics_config("dbg", t_r, mu, true);
            cfg.steps = 12000;
            let rep = run_scenario(&cfg, None, &mut NoHooks).unwrap();
            match settled_angles(&rep, &cfg) {
                Ok((th, cap)) => println!("T_r={t_r} dmu={dmu:+.3}: theta={th:7.2} cap={cap:7.2} gap={:+6.2}", th-cap),
                Err(e) => println!("T_r={t_r} dmu={dmu:+.3}: {e}"),
            }
        }
        println!("  [{:.0}s for 6 runs]", t0.elapsed().as_secs_f64());
    }
}
