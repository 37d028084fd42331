//! Run-configuration files: `key = value` lines under `[section]` headers,
//! `#` comments. Unknown keys are rejected, all violations are reported
//! together with their line numbers.

use capl_core::scenario::{GravitySchedule, ScenarioConfig};
use capl_core::wall::{Bulge, PatternSegment, Substrate, SurfaceShape, WettingPattern};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub line: usize,
    pub key: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.key, self.message)
    }
}

/// What a config file asks for: either a catalog family (optionally filtered
/// and overridden) or a fully explicit single run.
#[derive(Debug, Clone)]
pub enum RunSpec {
    Catalog {
        name: String,
        filters: Filters,
    },
    Single(Box<ScenarioConfig>),
}

#[derive(Debug, Clone, Default)]
pub struct Filters {
    pub mu_s: Option<f64>,
    pub d_phys_mm: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: RunSpec,
    pub small: bool,
    pub calibration_path: Option<String>,
    pub output_dir: Option<String>,
    pub steps_override: Option<u64>,
    pub measure_every_override: Option<u64>,
    pub snapshot_every_override: Option<u64>,
}

struct Entries {
    // "section.key" -> (line, raw value); BTreeMap keeps error order stable.
    map: BTreeMap<String, (usize, String)>,
    violations: Vec<Violation>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn violate(&mut self, line: usize, key: &str, msg: impl Into<String>) {
        self.violations.push(Violation {
            line,
            key: key.to_string(),
            message: msg.into(),
        });
    }

    fn f64(&mut self, key: &str) -> Option<f64> {
        let (line, raw) = self.take(key)?;
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.violate(line, key, format!("expected a number, got `{raw}`"));
                None
            }
        }
    }

    fn u64(&mut self, key: &str) -> Option<u64> {
        let (line, raw) = self.take(key)?;
        match raw.parse::<u64>() {
            Ok(v) => Some(v),
            _ => {
                self.violate(line, key, format!("expected a non-negative integer, got `{raw}`"));
                None
            }
        }
    }

    fn usize_checked(&mut self, key: &str, min: usize) -> Option<usize> {
        let (line, raw) = self.take(key)?;
        match raw.parse::<usize>() {
            Ok(v) if v >= min => Some(v),
            Ok(v) => {
                self.violate(line, key, format!("{v} below minimum {min}"));
                None
            }
            _ => {
                self.violate(line, key, format!("expected an integer, got `{raw}`"));
                None
            }
        }
    }

    fn boolean(&mut self, key: &str) -> Option<bool> {
        let (line, raw) = self.take(key)?;
        match raw.as_str() {
            "true" | "yes" | "1" => Some(true),
            "false" | "no" | "0" => Some(false),
            _ => {
                self.violate(line, key, format!("expected true/false, got `{raw}`"));
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        self.take(key).map(|(_, v)| v.trim_matches('"').to_string())
    }

    fn range_f64(&mut self, key: &str, lo: f64, hi: f64) -> Option<f64> {
        let (line, raw) = self.take(key)?;
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= lo && v <= hi => Some(v),
            Ok(v) => {
                self.violate(line, key, format!("{v} outside [{lo}, {hi}]"));
                None
            }
            _ => {
                self.violate(line, key, format!("expected a number, got `{raw}`"));
                None
            }
        }
    }
}

fn tokenize(text: &str) -> Result<Entries, Vec<Violation>> {
    let mut map = BTreeMap::new();
    let mut violations = Vec::new();
    let mut section = String::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                let key = if section.is_empty() {
                    k.trim().to_string()
                } else {
                    format!("{section}.{}", k.trim())
                };
                if map.insert(key.clone(), (line_no, v.trim().to_string())).is_some() {
                    violations.push(Violation {
                        line: line_no,
                        key,
                        message: "duplicate key".into(),
                    });
                }
            }
            None => violations.push(Violation {
                line: line_no,
                key: line.to_string(),
                message: "expected `key = value` or `[section]`".into(),
            }),
        }
    }
    if violations.is_empty() {
        Ok(Entries { map, violations })
    } else {
        Err(violations)
    }
}

fn parse_pattern(raw: &str, line: usize, e: &mut Entries) -> Option<WettingPattern> {
    let mut segments = Vec::new();
    for part in raw.trim_matches('"').split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        match part.split_once(':') {
            Some((frac, mu)) => match (frac.trim().parse::<f64>(), mu.trim().parse::<f64>()) {
                (Ok(frac_end), Ok(mu_s)) => segments.push(PatternSegment { frac_end, mu_s }),
                _ => {
                    e.violate(line, "substrate.pattern", format!("bad segment `{part}`"));
                    return None;
                }
            },
            None => {
                e.violate(
                    line,
                    "substrate.pattern",
                    format!("segment `{part}` is not `fraction:mu`"),
                );
                return None;
            }
        }
    }
    let p = WettingPattern {
        segments,
        period: None,
    };
    if let Err(err) = p.validate() {
        e.violate(line, "substrate.pattern", err.to_string());
        return None;
    }
    Some(p)
}

/// Parse and validate a configuration document. Returns the parsed request or
/// the complete list of violations.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<Violation>> {
    let mut e = tokenize(text)?;

    let scenario = e.string("scenario");
    let small = e.boolean("small").unwrap_or(false);
    let calibration_path = e.string("calibration");
    let output_dir = e.string("run.output_dir");
    let steps_override = e.u64("run.steps");
    let measure_every_override = e.u64("run.measure_every");
    let snapshot_every_override = e.u64("run.snapshot_every");

    let spec = if let Some(name) = scenario {
        let filters = Filters {
            mu_s: e.f64("substrate.mu_s"),
            d_phys_mm: e.f64("gravity.d_phys_mm"),
        };
        if !capl_core::catalog::NAMES.contains(&name.as_str()) {
            e.violate(
                0,
                "scenario",
                format!("unknown scenario `{name}`; known: {}", capl_core::catalog::NAMES.join(", ")),
            );
        }
        RunSpec::Catalog { name, filters }
    } else {
        // A fully explicit run.
        let nx = e.usize_checked("domain.nx", 5).unwrap_or(0);
        let ny = e.usize_checked("domain.ny", 5).unwrap_or(0);
        let t_r = e.range_f64("fluid.t_r", 1e-6, 1.5).unwrap_or(0.6);
        let mut cfg = ScenarioConfig::quiescent("run", nx.max(5), ny.max(5), t_r);
        if nx == 0 || ny == 0 {
            e.violate(0, "domain", "nx and ny are required for explicit runs");
        }
        cfg.nx = nx.max(5);
        cfg.ny = ny.max(5);
        if let Some(v) = e.range_f64("fluid.tau", 0.5 + 1e-9, 5.0) {
            cfg.relax.tau = v;
        }
        if let Some(v) = e.range_f64("fluid.s_e", 1e-9, 2.0 - 1e-9) {
            cfg.relax.s_e = v;
        }
        if let Some(v) = e.range_f64("fluid.s_eps", 1e-9, 2.0 - 1e-9) {
            cfg.relax.s_eps = v;
        }
        if let Some(v) = e.range_f64("fluid.s_q", 1e-9, 2.0 - 1e-9) {
            cfg.relax.s_q = v;
        }
        if let Some(v) = e.range_f64("fluid.kappa_hat", 1e-9, 10.0) {
            cfg.kappa_hat = v;
        }
        if let Some(v) = e.range_f64("fluid.k_scale", 1e-6, 10.0) {
            cfg.k_scale = v;
        }
        if let Some(v) = e.f64("droplet.radius") {
            cfg.radius = v;
        }
        if let Some(v) = e.f64("droplet.center_x") {
            cfg.center[0] = v;
        }
        if let Some(v) = e.f64("droplet.center_y") {
            cfg.center[1] = v;
        }
        if let Some((line, raw)) = e.take("droplet.interface_width") {
            match raw.parse::<f64>() {
                Ok(v) if v >= 4.0 => cfg.width = v,
                Ok(v) => e.violate(
                    line,
                    "droplet.interface_width",
                    format!("{v} below the resolvable minimum 4"),
                ),
                _ => e.violate(line, "droplet.interface_width", format!("expected a number, got `{raw}`")),
            }
        }
        if cfg.radius > 0.0 && cfg.radius < 3.0 * cfg.width {
            e.violate(
                0,
                "droplet.radius",
                format!("radius {} below 3 interface widths ({})", cfg.radius, 3.0 * cfg.width),
            );
        }

        // Substrate.
        let kind = e.string("substrate.kind").unwrap_or_else(|| "none".into());
        let level = e.f64("substrate.level");
        let sub_cx = e.f64("substrate.center_x");
        let chord = e.f64("substrate.chord");
        let height = e.f64("substrate.height");
        let radius_c = e.f64("substrate.radius_c");
        let extent = e.f64("substrate.extent_deg");
        let bulge = match e.string("substrate.bulge").as_deref() {
            Some("concave") => Bulge::Concave,
            _ => Bulge::Convex,
        };
        let overhead = e.boolean("substrate.overhead").unwrap_or(false);
        let slope_deg = e.f64("substrate.slope_deg").unwrap_or(0.0);
        let mu_s = e.f64("substrate.mu_s");
        let pattern_raw = e.take("substrate.pattern");
        let pattern_period = e.f64("substrate.pattern_period");
        let roughness = e.f64("substrate.roughness").unwrap_or(1.0);
        cfg.floor_level = e.f64("substrate.floor_level");
        cfg.floor_mu = e.f64("substrate.floor_mu");
        let y_lo = e.f64("substrate.y_lo");
        let y_hi = e.f64("substrate.y_hi");

        // Arc geometry may come as (chord, height) or (radius_c, chord) or
        // (radius_c, extent_deg).
        let arc_geom = |e: &mut Entries| -> Option<(f64, f64)> {
            match (chord, height, radius_c, extent) {
                (Some(c), Some(h), _, _) => Some((c, h)),
                (Some(c), None, Some(r), _) => {
                    if r * r > 0.25 * c * c {
                        Some((c, r - (r * r - 0.25 * c * c).sqrt()))
                    } else {
                        e.violate(0, "substrate.radius_c", "radius smaller than half the chord");
                        None
                    }
                }
                (None, None, Some(r), Some(ext)) => {
                    let half = 0.5 * ext.to_radians();
                    Some((2.0 * r * half.sin(), r * (1.0 - half.cos())))
                }
                _ => {
                    e.violate(
                        0,
                        "substrate",
                        "arc needs chord+height, radius_c+chord, or radius_c+extent_deg",
                    );
                    None
                }
            }
        };

        let shape = match kind.as_str() {
            "none" => None,
            "flat" => Some(SurfaceShape::Flat {
                level: level.unwrap_or_else(|| {
                    e.violate(0, "substrate.level", "required for flat substrates");
                    0.0
                }),
            }),
            "arc" => arc_geom(&mut e).map(|(c, h)| SurfaceShape::Arc {
                center_x: sub_cx.unwrap_or(cfg.nx as f64 / 2.0),
                level: level.unwrap_or(10.5),
                chord: c,
                height: h,
                bulge,
            }),
            "arc-wave" => arc_geom(&mut e).map(|(c, h)| SurfaceShape::ArcWave {
                origin_x: sub_cx.unwrap_or(0.0),
                level: level.unwrap_or(10.5),
                chord: c,
                height: h,
                bulge,
            }),
            "channel" => match (y_lo, y_hi) {
                (Some(lo), Some(hi)) => Some(SurfaceShape::Channel { y_lo: lo, y_hi: hi }),
                _ => {
                    e.violate(0, "substrate.kind", "channel needs y_lo and y_hi");
                    None
                }
            },
            other => {
                e.violate(
                    0,
                    "substrate.kind",
                    format!("unknown kind `{other}` (flat, arc, arc-wave, channel, none)"),
                );
                None
            }
        };
        if let Some(shape) = shape {
            let mut pattern = match pattern_raw {
                Some((line, raw)) => {
                    parse_pattern(&raw, line, &mut e).unwrap_or_else(|| WettingPattern::homogeneous(0.0))
                }
                None => WettingPattern::homogeneous(mu_s.unwrap_or(0.0)),
            };
            pattern.period = pattern_period;
            let mut sub = Substrate::new(shape, pattern);
            sub.overhead = overhead;
            sub.slope_deg = slope_deg;
            sub.roughness = roughness;
            if let Err(err) = sub.validate() {
                e.violate(0, "substrate", err.to_string());
            }
            cfg.substrate = Some(sub);
        }

        // Gravity: either a direct lattice magnitude or a physical diameter
        // resolved later against the calibration.
        let g_lat = e.f64("gravity.g_lat");
        cfg.d_phys_mm = e.f64("gravity.d_phys_mm");
        let ramp_start = e.u64("gravity.ramp_start").unwrap_or(0);
        let ramp_steps = e.u64("gravity.ramp_steps").unwrap_or(1);
        cfg.gravity = GravitySchedule {
            g_lat: g_lat.unwrap_or(0.0),
            slope_deg,
            ramp_start,
            ramp_steps,
        };

        cfg.steps = steps_override.unwrap_or(10_000);
        cfg.measure_every = measure_every_override.unwrap_or(500);
        cfg.snapshot_every = snapshot_every_override.unwrap_or(0);
        RunSpec::Single(Box::new(cfg))
    };

    // Anything left over is a typo.
    let leftovers: Vec<(String, usize)> = e
        .map
        .iter()
        .map(|(k, (line, _))| (k.clone(), *line))
        .collect();
    for (key, line) in leftovers {
        e.violate(line, &key, "unknown key");
    }
    if !e.violations.is_empty() {
        let mut v = e.violations;
        v.sort_by_key(|v| (v.line, v.key.clone()));
        return Err(v);
    }
    Ok(RunConfig {
        spec,
        small,
        calibration_path,
        output_dir,
        steps_override,
        measure_every_override,
        snapshot_every_override,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_catalog_reference() {
        let cfg = parse_config("scenario = theta-mu-sweep\nsmall = true\n").unwrap();
        assert!(cfg.small);
        match cfg.spec {
            RunSpec::Catalog { name, .. } => assert_eq!(name, "theta-mu-sweep"),
            _ => panic!("expected catalog spec"),
        }
    }

    #[test]
    fn all_violations_reported_together() {
        let text = "scenario = no-such-thing\n[droplet]\nradius = banana\n[junk]\nfoo = 1\n";
        let errs = parse_config(text).unwrap_err();
        let keys: Vec<&str> = errs.iter().map(|v| v.key.as_str()).collect();
        assert!(keys.contains(&"scenario"), "{errs:?}");
        assert!(keys.contains(&"droplet.radius"), "{errs:?}");
        assert!(keys.contains(&"junk.foo"), "{errs:?}");
    }

    #[test]
    fn narrow_interface_is_rejected_by_name() {
        let text = "[domain]\nnx = 64\nny = 64\n[fluid]\nt_r = 0.6\n[droplet]\nradius = 30\ninterface_width = 2\n";
        let errs = parse_config(text).unwrap_err();
        assert!(
            errs.iter().any(|v| v.key == "droplet.interface_width"),
            "{errs:?}"
        );
    }

    #[test]
    fn explicit_run_with_arc_by_radius() {
        let text = "\
[domain]
nx = 350
ny = 200
[fluid]
t_r = 0.6
[droplet]
radius = 25
interface_width = 5
center_x = 175
center_y = 80
[substrate]
kind = arc
level = 15.5
radius_c = 125
chord = 200
mu_s = 0.02
[run]
steps = 100
";
        let cfg = parse_config(text).unwrap();
        match cfg.spec {
            RunSpec::Single(c) => {
                let sub = c.substrate.unwrap();
                match sub.shape {
                    SurfaceShape::Arc { chord, height, .. } => {
                        assert_eq!(chord, 200.0);
                        assert!((capl_core::wall::arc_radius(chord, height) - 125.0).abs() < 1e-9);
                    }
                    _ => panic!("expected arc"),
                }
                assert_eq!(c.steps, 100);
            }
            _ => panic!("expected single run"),
        }
    }

    #[test]
    fn catalog_filter_keys_accepted() {
        let text = "scenario = sessile-gravity\n[substrate]\nmu_s = 0.1\n[gravity]\nd_phys_mm = 2\n";
        let cfg = parse_config(text).unwrap();
        match cfg.spec {
            RunSpec::Catalog { filters, .. } => {
                assert_eq!(filters.mu_s, Some(0.1));
                assert_eq!(filters.d_phys_mm, Some(2.0));
            }
            _ => panic!(),
        }
    }
}
