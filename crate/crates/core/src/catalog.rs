//! The canonical experiment families, with full-scale parameters and the
//! desk-scale `--small` variants (half resolution, about a tenth of the
//! steps).

use crate::calibrate::{mu_coex, Calibration};
use crate::error::{CoreError, Result};
use crate::scenario::{GravitySchedule, ScenarioConfig};
use crate::thermo::{maxwell_coexistence, ThermoParams};
use crate::units::{build_unit_map, G_PHYS};
use crate::wall::{Bulge, PatternSegment, Substrate, SurfaceShape, WettingPattern};

/// A named family of runs.
pub struct Experiment {
    pub name: String,
    pub description: String,
    pub runs: Vec<ScenarioConfig>,
}

pub const NAMES: [&str; 6] = [
    "theta-mu-sweep",
    "grid-independence",
    "sessile-gravity",
    "pendent-gravity",
    "hysteresis-homogeneous",
    "hysteresis-patterned",
];

pub fn describe(name: &str) -> &'static str {
    match name {
        "theta-mu-sweep" => "static droplets on the curved substrate over a wetting-potential sweep at T_r = 0.6 and 0.8",
        "grid-independence" => "fixed wetting, droplet radii 20..50 and substrate curvature radii 80..200",
        "sessile-gravity" => "sessile droplets, physical diameters 0..3 mm, walls of three wettability classes",
        "pendent-gravity" => "pendent droplets under an overhead substrate, growing gravity to detachment",
        "hysteresis-homogeneous" => "droplet rolling on an inclined wavy substrate of uniform wettability",
        "hysteresis-patterned" => "droplet rolling on an inclined wavy substrate with alternating wettability",
        _ => "",
    }
}

/// Scale-dependent numbers of the statics (sessile, curved-substrate) family.
struct StaticsScale {
    nx: usize,
    ny: usize,
    r0: f64,
    width: f64,
    level: f64,
    chord: f64,
    height: f64,
    steps: u64,
    measure_every: u64,
}

fn statics_scale(small: bool) -> StaticsScale {
    if small {
        StaticsScale {
            nx: 350,
            ny: 200,
            r0: 25.0,
            width: 5.0,
            level: 15.5,
            chord: 200.0,
            height: 50.0,
            steps: 14_000,
            measure_every: 500,
        }
    } else {
        StaticsScale {
            nx: 700,
            ny: 400,
            r0: 40.0,
            width: 10.0,
            level: 30.5,
            chord: 400.0,
            height: 100.0,
            steps: 60_000,
            measure_every: 1000,
        }
    }
}

/// One static droplet on the canonical curved substrate.
pub fn statics_config(label: &str, t_r: f64, mu_s: f64, small: bool) -> ScenarioConfig {
    let s = statics_scale(small);
    statics_config_sized(label, t_r, mu_s, s)
}

fn statics_config_sized(label: &str, t_r: f64, mu_s: f64, s: StaticsScale) -> ScenarioConfig {
    let apex = s.level + s.height;
    let mut cfg = ScenarioConfig::quiescent(label, s.nx, s.ny, t_r);
    cfg.radius = s.r0;
    cfg.width = s.width;
    // Damp the bulk modes: the initial profile launches a compression pulse
    // at the contact that can briefly push the density past the EOS ceiling.
    cfg.relax.s_e = 0.8;
    cfg.relax.s_eps = 0.8;
    // Start close to the expected equilibrium cap: place the droplet circle
    // so it meets the dome at the rough pre-calibration angle estimate. The
    // global shape relaxes slowly, so a good start saves most of the run.
    let est_slope = if t_r > 0.7 { 1370.0 } else { 740.0 };
    let theta0 = (90.0 + est_slope * (mu_s - mu_coex(t_r).unwrap_or(0.006))).clamp(35.0, 160.0);
    let r_dome = crate::wall::arc_radius(s.chord, s.height);
    let d = (r_dome * r_dome + s.r0 * s.r0
        - 2.0 * r_dome * s.r0 * theta0.to_radians().cos())
    .sqrt();
    let dome_cy = s.level + s.height - r_dome;
    cfg.center = [
        s.nx as f64 / 2.0,
        (dome_cy + d).clamp(apex + 0.35 * s.r0, apex + 0.8 * s.r0),
    ];
    cfg.substrate = Some(Substrate::new(
        SurfaceShape::Arc {
            center_x: s.nx as f64 / 2.0,
            level: s.level,
            chord: s.chord,
            height: s.height,
            bulge: Bulge::Convex,
        },
        WettingPattern::homogeneous(mu_s),
    ));
    cfg.steps = s.steps;
    cfg.measure_every = s.measure_every;
    cfg
}

/// The wetting-potential sweep of the theta(mu) family, centered on the
/// neutral (coexistence) potential at this temperature.
pub fn theta_mu_values(t_r: f64) -> Result<Vec<f64>> {
    let center = mu_coex(t_r)?;
    // Offsets span hydrophilic to superhydrophobic; the response steepens as
    // the density contrast shrinks, so the higher temperature uses a tighter
    // spread.
    let scale = if t_r > 0.7 { 0.45 } else { 1.0 };
    Ok([
        -0.045, -0.030, -0.020, -0.010, 0.0, 0.012, 0.025, 0.040, 0.055, 0.070, 0.085,
    ]
    .iter()
    .map(|d| center + d * scale)
    .collect())
}

/// Resolve the lattice gravity magnitude for a physical droplet diameter.
pub fn gravity_for(
    d_phys_mm: f64,
    r0: f64,
    slope_deg: f64,
    ramp_start: u64,
    ramp_steps: u64,
    calib: &Calibration,
    t_r: f64,
) -> Result<GravitySchedule> {
    let th = ThermoParams::new(t_r)?;
    let coex = maxwell_coexistence(&th)?;
    let map = build_unit_map(d_phys_mm, G_PHYS, r0, calib.gamma_lat, &coex)?;
    Ok(GravitySchedule {
        g_lat: map.g_lat,
        slope_deg,
        ramp_start,
        ramp_steps,
    })
}

fn need_calib<'c>(calib: Option<&'c Calibration>, what: &str) -> Result<&'c Calibration> {
    calib.ok_or_else(|| {
        CoreError::Calibration(format!(
            "{what} needs measured surface tension and wetting response; run `capl calibrate` first"
        ))
    })
}

/// Wavy-substrate rolling-droplet configuration.
#[allow(clippy::too_many_arguments)]
fn hysteresis_config(
    label: &str,
    small: bool,
    pattern: WettingPattern,
    calib: &Calibration,
) -> Result<ScenarioConfig> {
    let t_r = 0.6;
    let (nx, ny, r0, width, level, wave_chord, wave_h) = if small {
        (1500, 180, 50.0, 5.0, 20.5, 100.0, 1.6)
    } else {
        (3000, 360, 100.0, 10.0, 41.0, 200.0, 3.2)
    };
    let (equil, ramp, total, cadence) = if small {
        (6_000, 3_000, 60_000, 100)
    } else {
        (50_000, 20_000, 600_000, 500)
    };
    let mut cfg = ScenarioConfig::quiescent(label, nx, ny, t_r);
    cfg.radius = r0;
    cfg.width = width;
    cfg.relax.tau = 0.7;
    let apex = level + wave_h;
    // Start centered on a crest.
    let crest = (nx as f64 / 2.0 / wave_chord).floor() * wave_chord + 0.25 * wave_chord;
    cfg.center = [crest, apex + 0.6 * r0];
    let mut sub = Substrate::new(
        SurfaceShape::ArcWave {
            origin_x: 0.0,
            level,
            chord: wave_chord,
            height: wave_h,
            bulge: Bulge::Convex,
        },
        pattern,
    );
    sub.slope_deg = 20.0;
    cfg.substrate = Some(sub);
    cfg.gravity = gravity_for(4.0, r0, 20.0, equil, ramp, calib, t_r)?;
    cfg.d_phys_mm = Some(4.0);
    cfg.steps = total;
    cfg.measure_every = cadence;
    Ok(cfg)
}

/// Arc-length of one wave period (used to align a wetting pattern with the
/// substrate geometry).
pub fn wave_pattern_period(cfg: &ScenarioConfig) -> Result<f64> {
    let sub = cfg
        .substrate
        .as_ref()
        .ok_or_else(|| CoreError::Config("no substrate".into()))?;
    match sub.shape {
        SurfaceShape::ArcWave { chord, .. } => {
            Ok(sub.total_arc_length(cfg.nx) / (cfg.nx as f64 / chord))
        }
        _ => Err(CoreError::Config("substrate is not a wave".into())),
    }
}

/// Build a named experiment family.
pub fn build(name: &str, small: bool, calib: Option<&Calibration>) -> Result<Experiment> {
    let t_r = 0.6;
    match name {
        "theta-mu-sweep" => {
            let mut runs = Vec::new();
            for t in [0.6, 0.8] {
                for mu in theta_mu_values(t)? {
                    runs.push(statics_config(
                        &format!("theta-mu-t{t}-mu{mu:+.5}"),
                        t,
                        mu,
                        small,
                    ));
                }
            }
            Ok(Experiment {
                name: name.into(),
                description: describe(name).into(),
                runs,
            })
        }
        "grid-independence" => {
            let mu_s = mu_coex(t_r)? + 0.0135; // the 100-degree class
            let mut runs = Vec::new();
            let base = statics_scale(small);
            let radii: &[f64] = if small {
                &[20.0, 30.0, 40.0, 50.0]
            } else {
                &[30.0, 50.0, 70.0, 100.0]
            };
            for &r0 in radii {
                let mut s = statics_scale(small);
                s.r0 = r0;
                s.width = 5.0f64.min(r0 / 4.0).max(4.0);
                if !small {
                    s.width = 10.0f64.min(r0 / 4.0);
                }
                s.ny = ((s.level + s.height + 4.6 * r0 + 24.0) / 2.0).ceil() as usize * 2;
                runs.push(statics_config_sized(
                    &format!("grid-r0-{r0}"),
                    t_r,
                    mu_s,
                    s,
                ));
            }
            let curvatures: &[f64] = if small {
                &[80.0, 120.0, 160.0, 200.0]
            } else {
                &[150.0, 250.0, 325.0, 400.0]
            };
            for &rc in curvatures {
                let chord = 1.2 * rc;
                let height = rc - (rc * rc - 0.25 * chord * chord).sqrt();
                let mut s = statics_scale(small);
                s.chord = chord;
                s.height = height;
                s.nx = ((chord + 80.0).max(8.0 * s.r0) / 2.0).ceil() as usize * 2;
                s.ny = ((s.level + height + 4.6 * s.r0 + 24.0) / 2.0).ceil() as usize * 2;
                runs.push(statics_config_sized(
                    &format!("grid-rc-{rc}"),
                    t_r,
                    mu_s,
                    s,
                ));
            }
            let _ = base;
            Ok(Experiment {
                name: name.into(),
                description: describe(name).into(),
                runs,
            })
        }
        "sessile-gravity" => {
            let calib = need_calib(calib, "sessile-gravity")?;
            let mut runs = Vec::new();
            // The paper's wetting triplet (70, 100, 140 degree classes).
            for mu_s in [-0.01, 0.04, 0.1] {
                for d_mm in [0.0, 0.5, 1.0, 2.0, 3.0] {
                    let mut cfg = statics_config(
                        &format!("sessile-mu{mu_s:+.3}-d{d_mm}"),
                        t_r,
                        mu_s,
                        small,
                    );
                    let (free, ramp, hold) = if small {
                        (12_000, 2_000, 8_000)
                    } else {
                        (100_000, 20_000, 60_000)
                    };
                    cfg.gravity = gravity_for(d_mm, cfg.radius, 0.0, free, ramp, calib, t_r)?;
                    cfg.d_phys_mm = Some(d_mm);
                    cfg.steps = free + ramp + hold;
                    runs.push(cfg);
                }
            }
            Ok(Experiment {
                name: name.into(),
                description: describe(name).into(),
                runs,
            })
        }
        "pendent-gravity" => {
            let calib = need_calib(calib, "pendent-gravity")?;
            let mut runs = Vec::new();
            for mu_s in [-0.01, 0.04, 0.1] {
                if small {
                    // Quasi-static growth: one run per wall, gravity ramping
                    // slowly to the 2.8 mm equivalent; the detachment step
                    // dates the threshold.
                    runs.push(pendent_config(
                        &format!("pendent-mu{mu_s:+.3}-ramp"),
                        mu_s,
                        2.8,
                        true,
                        calib,
                    )?);
                } else {
                    for d_mm in [0.0, 0.5, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25] {
                        runs.push(pendent_config(
                            &format!("pendent-mu{mu_s:+.3}-d{d_mm}"),
                            mu_s,
                            d_mm,
                            false,
                            calib,
                        )?);
                    }
                }
            }
            Ok(Experiment {
                name: name.into(),
                description: describe(name).into(),
                runs,
            })
        }
        "hysteresis-homogeneous" => {
            let calib = need_calib(calib, "hysteresis-homogeneous")?;
            let eq = calib.reference_at(t_r)?;
            let cfg = hysteresis_config(
                "hysteresis-homogeneous",
                small,
                WettingPattern::homogeneous(eq.mu_of_theta(120.0)),
                calib,
            )?;
            Ok(Experiment {
                name: name.into(),
                description: describe(name).into(),
                runs: vec![cfg],
            })
        }
        "hysteresis-patterned" => {
            let calib = need_calib(calib, "hysteresis-patterned")?;
            let eq = calib.reference_at(t_r)?;
            let mut cfg = hysteresis_config(
                "hysteresis-patterned",
                small,
                WettingPattern::homogeneous(eq.mu_of_theta(120.0)),
                calib,
            )?;
            let period = wave_pattern_period(&cfg)?;
            if let Some(sub) = cfg.substrate.as_mut() {
                // Hydrophilic patches on 30% of each wave period.
                sub.pattern = WettingPattern {
                    segments: vec![
                        PatternSegment {
                            frac_end: 0.3,
                            mu_s: eq.mu_of_theta(65.0),
                        },
                        PatternSegment {
                            frac_end: 1.0,
                            mu_s: eq.mu_of_theta(120.0),
                        },
                    ],
                    period: Some(period),
                };
            }
            Ok(Experiment {
                name: name.into(),
                description: describe(name).into(),
                runs: vec![cfg],
            })
        }
        other => Err(CoreError::Config(format!(
            "unknown scenario `{other}`; known: {}",
            NAMES.join(", ")
        ))),
    }
}

/// One pendent run: droplet hanging under an overhead curved substrate, with
/// a floor closing the domain below.
fn pendent_config(
    label: &str,
    mu_s: f64,
    d_mm: f64,
    quasi_static: bool,
    calib: &Calibration,
) -> Result<ScenarioConfig> {
    let t_r = 0.6;
    let (nx, ny, r0, width) = (300, 190, 20.0, 5.0);
    let level = ny as f64 - 15.5;
    let (chord, height) = (160.0, 40.0);
    let mut cfg = ScenarioConfig::quiescent(label, nx, ny, t_r);
    cfg.radius = r0;
    cfg.width = width;
    // Overhead substrate: the physical surface hangs at level - bump.
    let apex = level - height;
    cfg.center = [nx as f64 / 2.0, apex - 0.6 * r0];
    let mut sub = Substrate::new(
        SurfaceShape::Arc {
            center_x: nx as f64 / 2.0,
            level,
            chord,
            height,
            bulge: Bulge::Convex,
        },
        WettingPattern::homogeneous(mu_s),
    );
    sub.overhead = true;
    cfg.substrate = Some(sub);
    cfg.floor_level = Some(3.5);
    let (free, ramp, hold) = if quasi_static {
        (3_000, 24_000, 2_000)
    } else {
        (12_000, 2_000, 8_000)
    };
    cfg.gravity = gravity_for(d_mm, r0, 0.0, free, ramp, calib, t_r)?;
    cfg.d_phys_mm = Some(d_mm);
    cfg.steps = free + ramp + hold;
    cfg.measure_every = 250;
    Ok(cfg)
}
