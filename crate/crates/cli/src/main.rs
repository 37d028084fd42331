//! Command-line entry points for the capl multiphase solver.
//!
//! Subcommands: run, catalog, calibrate, measure, plot.
//! Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 divergence.

use capl_cli::{calfile, config, csvio, dump, svg};
use capl_core::calibrate::{measure_surface_tension, wetting_response, Calibration};
use capl_core::catalog;
use capl_core::measure::{measure_contact_angle, AnglePair, Side};
use capl_core::scenario::{run_scenario, RunHooks, ScenarioConfig, Simulation};
use capl_core::wall::classify_nodes_with_floor;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: 1, message: msg.into() }
    }
    fn runtime(msg: impl Into<String>) -> Self {
        Self { code: 2, message: msg.into() }
    }
    fn divergence(msg: impl Into<String>) -> Self {
        Self { code: 3, message: msg.into() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::runtime(format!("io error: {e}"))
    }
}

impl From<capl_core::CoreError> for Failure {
    fn from(e: capl_core::CoreError) -> Self {
        Failure::runtime(e.to_string())
    }
}

const USAGE: &str = "\
capl - multiphase lattice Boltzmann solver with in-situ contact angle measurement

USAGE:
  capl run <config-file | scenario-name> [--small] [--out DIR] [--calibration FILE]
  capl catalog
  capl calibrate [--out FILE] [--full]
  capl measure <field-dump.capl> <substrate-config>
  capl plot <angles.csv> <theta-mu | hysteresis | force> [--out FILE]

Scenario names (see `capl catalog`): theta-mu-sweep, grid-independence,
sessile-gravity, pendent-gravity, hysteresis-homogeneous, hysteresis-patterned.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            if f.code == 1 {
                eprintln!("\n{USAGE}");
            }
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(args: &[String]) -> Result<(), Failure> {
    match args.first().map(|s| s.as_str()) {
        Some("run") => cmd_run(&args[1..]),
        Some("catalog") => cmd_catalog(),
        Some("calibrate") => cmd_calibrate(&args[1..]),
        Some("measure") => cmd_measure(&args[1..]),
        Some("plot") => cmd_plot(&args[1..]),
        Some("--help") | Some("-h") | None => {
            println!("{USAGE}");
            Ok(())
        }
        Some(other) => Err(Failure::usage(format!("unknown subcommand `{other}`"))),
    }
}

fn flag_value(args: &[String], flag: &str) -> Option<String> {
    args.iter()
        .position(|a| a == flag)
        .and_then(|i| args.get(i + 1))
        .cloned()
}

fn cmd_catalog() -> Result<(), Failure> {
    println!("available scenarios:\n");
    for name in catalog::NAMES {
        println!("  {name:>24}  {}", catalog::describe(name));
    }
    println!("\nevery scenario has a --small desk-scale variant (half resolution, ~1/10 steps)");
    Ok(())
}

fn load_calibration(path: Option<&str>) -> Option<Calibration> {
    let path = PathBuf::from(path.unwrap_or("calibration.capl"));
    calfile::load(&path).ok()
}

/// Streams snapshots to disk and collects the measured angle series.
struct DiskHooks {
    dir: PathBuf,
    pairs: Vec<AnglePair>,
}

impl RunHooks for DiskHooks {
    fn on_snapshot(&mut self, sim: &Simulation) {
        let d = dump::FieldDump {
            nx: sim.grid.nx as u32,
            ny: sim.grid.ny as u32,
            step: sim.step,
            t_r: sim.cfg.t_r,
            name: "rho".into(),
            values: sim.rho.clone(),
        };
        let _ = d.save(&self.dir.join(format!("rho-{:08}.capl", sim.step)));
    }
    fn on_measurement(&mut self, pair: &AnglePair, _sim: &Simulation) {
        self.pairs.push(pair.clone());
    }
}

fn execute_runs(
    runs: &[ScenarioConfig],
    calib: Option<&Calibration>,
    out_root: &Path,
) -> Result<(), Failure> {
    std::fs::create_dir_all(out_root)?;
    let mut any_diverged = false;
    for cfg in runs {
        let dir = out_root.join(&cfg.name);
        std::fs::create_dir_all(&dir)?;
        let eq = calib.and_then(|c| c.reference_at(cfg.t_r).ok());
        let mut hooks = DiskHooks { dir: dir.clone(), pairs: Vec::new() };
        println!(
            "running {} ({}x{}, {} steps)...",
            cfg.name, cfg.nx, cfg.ny, cfg.steps
        );
        let report = run_scenario(cfg, eq.as_ref(), &mut hooks)?;
        csvio::save_angle_series(&hooks.pairs, &dir.join("angles.csv"))?;
        let final_dump = dump::FieldDump {
            nx: report.grid.nx as u32,
            ny: report.grid.ny as u32,
            step: report.steps_completed,
            t_r: report.t_r,
            name: "rho".into(),
            values: report.final_rho.clone(),
        };
        final_dump.save(&dir.join("rho-final.capl"))?;
        if cfg.name.contains("hysteresis") {
            let rows = csvio::load_angle_series(&dir.join("angles.csv"))?;
            std::fs::write(dir.join("hysteresis.svg"), svg::hysteresis_plot(&rows))?;
            std::fs::write(dir.join("force.svg"), svg::force_plot(&rows))?;
        }
        match (&report.diverged, report.detach_step) {
            (Some(d), _) => {
                any_diverged = true;
                println!("  diverged: {d} (partial results kept)");
            }
            (None, Some(step)) => println!("  completed; droplet detached at step {step}"),
            (None, None) => println!("  completed"),
        }
    }
    if any_diverged {
        Err(Failure::divergence("one or more runs diverged"))
    } else {
        Ok(())
    }
}

fn cmd_run(args: &[String]) -> Result<(), Failure> {
    let target = args
        .first()
        .ok_or_else(|| Failure::usage("run needs a config file or scenario name"))?;
    let small_flag = args.iter().any(|a| a == "--small");
    let out_dir = flag_value(args, "--out");
    let calib = load_calibration(flag_value(args, "--calibration").as_deref());

    let (spec, small, out) = if Path::new(target).exists() {
        let text = std::fs::read_to_string(target)?;
        match config::parse_config(&text) {
            Ok(rc) => {
                let out = rc.output_dir.clone().or(out_dir).unwrap_or_else(|| "out".into());
                let s = rc.small;
                (rc, small_flag || s, out)
            }
            Err(violations) => {
                let mut msg = String::from("invalid configuration:\n");
                for v in violations {
                    msg.push_str(&format!("  {v}\n"));
                }
                return Err(Failure::usage(msg));
            }
        }
    } else if catalog::NAMES.contains(&target.as_str()) {
        let rc = config::RunConfig {
            spec: config::RunSpec::Catalog {
                name: target.clone(),
                filters: config::Filters::default(),
            },
            small: small_flag,
            calibration_path: None,
            output_dir: None,
            steps_override: None,
            measure_every_override: None,
            snapshot_every_override: None,
        };
        (rc, small_flag, out_dir.unwrap_or_else(|| "out".into()))
    } else {
        return Err(Failure::usage(format!(
            "`{target}` is neither a config file nor a known scenario"
        )));
    };

    let calib = match &spec.calibration_path {
        Some(p) => load_calibration(Some(p)).or(calib),
        None => calib,
    };

    let mut runs: Vec<ScenarioConfig> = match &spec.spec {
        config::RunSpec::Catalog { name, filters } => {
            let exp = catalog::build(name, small, calib.as_ref())?;
            exp.runs
                .into_iter()
                .filter(|r| {
                    let mu_ok = filters.mu_s.map_or(true, |mu| {
                        r.substrate
                            .as_ref()
                            .map(|s| s.pattern.segments.iter().any(|seg| (seg.mu_s - mu).abs() < 1e-12))
                            .unwrap_or(false)
                    });
                    let d_ok = filters
                        .d_phys_mm
                        .map_or(true, |d| r.d_phys_mm.map_or(false, |rd| (rd - d).abs() < 1e-9));
                    mu_ok && d_ok
                })
                .collect()
        }
        config::RunSpec::Single(cfg) => {
            let mut cfg = (**cfg).clone();
            if cfg.gravity.g_lat == 0.0 {
                if let Some(d) = cfg.d_phys_mm {
                    if d > 0.0 {
                        let c = calib.as_ref().ok_or_else(|| {
                            Failure::runtime(
                                "gravity.d_phys_mm needs a calibration file; run `capl calibrate`",
                            )
                        })?;
                        cfg.gravity = catalog::gravity_for(
                            d,
                            cfg.radius,
                            cfg.gravity.slope_deg,
                            cfg.gravity.ramp_start,
                            cfg.gravity.ramp_steps,
                            c,
                            cfg.t_r,
                        )?;
                    }
                }
            }
            vec![cfg]
        }
    };
    if let Some(s) = spec.steps_override {
        for r in runs.iter_mut() {
            r.steps = s;
        }
    }
    if let Some(s) = spec.measure_every_override {
        for r in runs.iter_mut() {
            r.measure_every = s;
        }
    }
    if let Some(s) = spec.snapshot_every_override {
        for r in runs.iter_mut() {
            r.snapshot_every = s;
        }
    }
    if runs.is_empty() {
        return Err(Failure::usage("no runs match the requested filters"));
    }
    execute_runs(&runs, calib.as_ref(), Path::new(&out))
}

fn cmd_calibrate(args: &[String]) -> Result<(), Failure> {
    let out = flag_value(args, "--out").unwrap_or_else(|| "calibration.capl".into());
    let small = !args.iter().any(|a| a == "--full");
    let t_r = 0.6;
    println!("measuring surface tension (Laplace law, radii 20/30/40)...");
    let (gamma, resid, points) = measure_surface_tension(t_r, &[20.0, 30.0, 40.0], 9000)?;
    println!("  gamma_lat = {gamma:.6e} (fit residual {resid:.2e})");
    let mut by_temperature = Vec::new();
    for t in [0.6, 0.8] {
        println!("measuring wetting response at T_r = {t}...");
        let mus = catalog::theta_mu_values(t)?;
        let tc = wetting_response(t, &mus, &|tt, mu| {
            catalog::statics_config(&format!("cal-t{tt}-mu{mu:+.5}"), tt, mu, small)
        })?;
        println!(
            "  theta(mu) = {:.1} mu + {:.2}, relative L2 error {:.4}",
            tc.slope, tc.intercept, tc.l2_error
        );
        by_temperature.push(tc);
    }
    let calibration = Calibration {
        gamma_t_r: t_r,
        gamma_lat: gamma,
        gamma_residual: resid,
        laplace_points: points,
        by_temperature,
    };
    calfile::save(&calibration, Path::new(&out))?;
    println!("calibration written to {out}");
    Ok(())
}

fn cmd_measure(args: &[String]) -> Result<(), Failure> {
    let (dump_path, cfg_path) = match args {
        [d, c, ..] => (d, c),
        _ => return Err(Failure::usage("measure needs <field-dump.capl> <substrate-config>")),
    };
    let field = dump::FieldDump::load(Path::new(dump_path))?;
    let text = std::fs::read_to_string(cfg_path)?;
    let parsed = config::parse_config(&text).map_err(|v| {
        Failure::usage(format!(
            "invalid substrate config:\n{}",
            v.iter().map(|e| format!("  {e}\n")).collect::<String>()
        ))
    })?;
    let cfg = match parsed.spec {
        config::RunSpec::Single(c) => *c,
        _ => return Err(Failure::usage("measure needs an explicit config with a [substrate] section")),
    };
    let sub = cfg
        .substrate
        .as_ref()
        .ok_or_else(|| Failure::usage("config has no [substrate] section"))?;
    let grid = capl_core::Grid::new(field.nx as usize, field.ny as usize);
    let cls = classify_nodes_with_floor(grid, sub, cfg.floor_level)?;
    let th = capl_core::ThermoParams::new(field.t_r)?;
    let coex = capl_core::thermo::maxwell_coexistence(&th)?;
    let curve =
        capl_core::measure::extract_interface(&field.values, &cls.kind, grid, coex.rho_g, coex.rho_l)?;
    println!("field `{}` at step {} (T_r = {})", field.name, field.step, field.t_r);
    for side in [Side::Advancing, Side::Receding] {
        match measure_contact_angle(&curve, sub, side, true, None) {
            Ok(m) => println!(
                "{:>9}: theta = {:.4} deg at ({:.3}, {:.3}), tangent inclination {:.3} deg",
                side.name(),
                m.theta_deg,
                m.contact[0],
                m.contact[1],
                m.alpha_deg
            ),
            Err(e) => println!("{:>9}: {e}", side.name()),
        }
    }
    Ok(())
}

fn cmd_plot(args: &[String]) -> Result<(), Failure> {
    let (csv_path, kind) = match args {
        [c, k, ..] => (c, k),
        _ => return Err(Failure::usage("plot needs <angles.csv> <kind>")),
    };
    let out = flag_value(args, "--out").unwrap_or_else(|| format!("{csv_path}.{kind}.svg"));
    if kind == "theta-mu" {
        // A two-column mu,theta file (written by the calibration tooling).
        return plot_theta_mu(csv_path, &out);
    }
    let rows = csvio::load_angle_series(Path::new(csv_path))?;
    if rows.is_empty() {
        return Err(Failure::runtime("empty series: nothing to plot"));
    }
    let content = match kind.as_str() {
        "hysteresis" => svg::hysteresis_plot(&rows),
        "force" => svg::force_plot(&rows),
        other => {
            return Err(Failure::usage(format!(
                "unknown plot kind `{other}` (theta-mu, hysteresis, force)"
            )))
        }
    };
    std::fs::write(&out, content)?;
    println!("wrote {out}");
    Ok(())
}

fn plot_theta_mu(csv_path: &str, out: &str) -> Result<(), Failure> {
    let text = std::fs::read_to_string(csv_path)?;
    let mut samples = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("mu") {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() < 2 {
            continue;
        }
        if let (Ok(mu), Ok(theta)) = (cells[0].parse::<f64>(), cells[1].parse::<f64>()) {
            samples.push((mu, theta));
        }
    }
    if samples.len() < 2 {
        return Err(Failure::runtime("theta-mu plot needs at least two mu,theta rows"));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (slope, intercept, err) = capl_core::measure::linear_fit_l2(&xs, &ys)?;
    std::fs::write(out, svg::theta_mu_plot(&samples, slope, intercept, err))?;
    println!("wrote {out}");
    Ok(())
}
