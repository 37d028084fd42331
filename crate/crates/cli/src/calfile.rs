//! Calibration file: a small structured-text document holding the measured
//! lattice surface tension and the per-temperature wetting response.

use capl_core::calibrate::{Calibration, TemperatureCalibration, ThetaMuSample};
use std::io;

pub fn to_text(c: &Calibration) -> String {
    let mut out = String::new();
    out.push_str("# capl calibration v1\n");
    out.push_str(&format!("gamma_t_r = {}\n", c.gamma_t_r));
    out.push_str(&format!("gamma_lat = {}\n", c.gamma_lat));
    out.push_str(&format!("gamma_residual = {}\n", c.gamma_residual));
    let pts: Vec<String> = c
        .laplace_points
        .iter()
        .map(|(r, dp)| format!("{r}:{dp}"))
        .collect();
    out.push_str(&format!("laplace = {}\n", pts.join(",")));
    for tc in &c.by_temperature {
        out.push_str(&format!("\n[theta_mu]\nt_r = {}\n", tc.t_r));
        out.push_str(&format!("slope = {}\n", tc.slope));
        out.push_str(&format!("intercept = {}\n", tc.intercept));
        out.push_str(&format!("l2_error = {}\n", tc.l2_error));
        let samples: Vec<String> = tc
            .samples
            .iter()
            .map(|s| format!("{}:{}:{}", s.mu_s, s.theta_measured, s.theta_cap))
            .collect();
        out.push_str(&format!("samples = {}\n", samples.join(",")));
    }
    out
}

pub fn from_text(text: &str) -> io::Result<Calibration> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut gamma_t_r = None;
    let mut gamma_lat = None;
    let mut gamma_residual = None;
    let mut laplace_points = Vec::new();
    let mut by_temperature: Vec<TemperatureCalibration> = Vec::new();
    let mut current: Option<TemperatureCalibration> = None;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "[theta_mu]" {
            if let Some(tc) = current.take() {
                by_temperature.push(tc);
            }
            current = Some(TemperatureCalibration {
                t_r: f64::NAN,
                samples: Vec::new(),
                slope: f64::NAN,
                intercept: f64::NAN,
                l2_error: f64::NAN,
            });
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key = value, got `{line}`")))?;
        let (k, v) = (k.trim(), v.trim());
        let num = || -> io::Result<f64> {
            v.parse::<f64>()
                .map_err(|e| bad(format!("bad number for {k}: {e}")))
        };
        match (&mut current, k) {
            (None, "gamma_t_r") => gamma_t_r = Some(num()?),
            (None, "gamma_lat") => gamma_lat = Some(num()?),
            (None, "gamma_residual") => gamma_residual = Some(num()?),
            (None, "laplace") => {
                for part in v.split(',').filter(|p| !p.trim().is_empty()) {
                    let (r, dp) = part
                        .split_once(':')
                        .ok_or_else(|| bad(format!("bad laplace point `{part}`")))?;
                    laplace_points.push((
                        r.trim().parse().map_err(|e| bad(format!("{e}")))?,
                        dp.trim().parse().map_err(|e| bad(format!("{e}")))?,
                    ));
                }
            }
            (Some(tc), "t_r") => tc.t_r = num()?,
            (Some(tc), "slope") => tc.slope = num()?,
            (Some(tc), "intercept") => tc.intercept = num()?,
            (Some(tc), "l2_error") => tc.l2_error = num()?,
            (Some(tc), "samples") => {
                for part in v.split(',').filter(|p| !p.trim().is_empty()) {
                    let fields: Vec<&str> = part.split(':').collect();
                    if fields.len() != 3 {
                        return Err(bad(format!("bad sample `{part}`")));
                    }
                    tc.samples.push(ThetaMuSample {
                        mu_s: fields[0].trim().parse().map_err(|e| bad(format!("{e}")))?,
                        theta_measured: fields[1].trim().parse().map_err(|e| bad(format!("{e}")))?,
                        theta_cap: fields[2].trim().parse().map_err(|e| bad(format!("{e}")))?,
                    });
                }
            }
            (_, other) => return Err(bad(format!("unknown calibration key `{other}`"))),
        }
    }
    if let Some(tc) = current.take() {
        by_temperature.push(tc);
    }
    Ok(Calibration {
        gamma_t_r: gamma_t_r.ok_or_else(|| bad("missing gamma_t_r".into()))?,
        gamma_lat: gamma_lat.ok_or_else(|| bad("missing gamma_lat".into()))?,
        gamma_residual: gamma_residual.ok_or_else(|| bad("missing gamma_residual".into()))?,
        laplace_points,
        by_temperature,
    })
}

pub fn save(c: &Calibration, path: &std::path::Path) -> io::Result<()> {
    std::fs::write(path, to_text(c))
}

pub fn load(path: &std::path::Path) -> io::Result<Calibration> {
    from_text(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = Calibration {
            gamma_t_r: 0.6,
            gamma_lat: 0.1042,
            gamma_residual: 0.008,
            laplace_points: vec![(19.5, 0.0053), (29.6, 0.0036)],
            by_temperature: vec![TemperatureCalibration {
                t_r: 0.6,
                samples: vec![ThetaMuSample {
                    mu_s: 0.0062,
                    theta_measured: 90.4,
                    theta_cap: 90.8,
                }],
                slope: 742.0,
                intercept: 85.7,
                l2_error: 0.021,
            }],
        };
        let text = to_text(&c);
        let back = from_text(&text).unwrap();
        assert_eq!(back.gamma_lat, c.gamma_lat);
        assert_eq!(back.by_temperature.len(), 1);
        assert_eq!(back.by_temperature[0].samples.len(), 1);
        assert_eq!(back.by_temperature[0].slope, 742.0);
        assert_eq!(back.laplace_points, c.laplace_points);
    }
}
