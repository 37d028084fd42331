//! Self-contained deterministic SVG plots: byte-identical output for
//! identical input.

use crate::csvio::AngleRow;
use std::fmt::Write as _;

struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Panel {
    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xmin) / (self.xmax - self.xmin) * self.w
    }
    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.ymin) / (self.ymax - self.ymin) * self.h
    }
}

fn fnum(v: f64) -> String {
    format!("{v:.4}")
}

fn axis_ticks(min: f64, max: f64) -> Vec<f64> {
    let span = (max - min).abs().max(1e-300);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(mag * 10.0);
    let mut t = (min / step).ceil() * step;
    let mut out = Vec::new();
    while t <= max + 1e-12 * span {
        out.push(t);
        t += step;
    }
    out
}

fn draw_panel(svg: &mut String, p: &Panel, xlabel: &str, ylabel: &str, title: &str) {
    let _ = write!(
        svg,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        fnum(p.x0),
        fnum(p.y0),
        fnum(p.w),
        fnum(p.h)
    );
    for t in axis_ticks(p.xmin, p.xmax) {
        let x = p.px(t);
        let _ = write!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/><text x="{0}" y="{3}" font-size="10" text-anchor="middle">{4}</text>"#,
            fnum(x),
            fnum(p.y0 + p.h),
            fnum(p.y0 + p.h + 4.0),
            fnum(p.y0 + p.h + 16.0),
            format_tick(t)
        );
    }
    for t in axis_ticks(p.ymin, p.ymax) {
        let y = p.py(t);
        let _ = write!(
            svg,
            r#"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}" stroke="black"/><text x="{3}" y="{0}" font-size="10" text-anchor="end">{4}</text>"#,
            fnum(y),
            fnum(p.x0),
            fnum(p.x0 - 4.0),
            fnum(p.x0 - 7.0),
            format_tick(t)
        );
    }
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
        fnum(p.x0 + 0.5 * p.w),
        fnum(p.y0 + p.h + 30.0),
        xlabel
    );
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="middle" transform="rotate(-90 {} {})">{}</text>"#,
        fnum(p.x0 - 38.0),
        fnum(p.y0 + 0.5 * p.h),
        fnum(p.x0 - 38.0),
        fnum(p.y0 + 0.5 * p.h),
        ylabel
    );
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" font-weight="bold">{}</text>"#,
        fnum(p.x0 + 0.5 * p.w),
        fnum(p.y0 - 6.0),
        title
    );
}

fn format_tick(t: f64) -> String {
    if t == 0.0 {
        "0".into()
    } else if t.abs() >= 1000.0 || t.abs() < 0.01 {
        format!("{t:.1e}")
    } else {
        let s = format!("{t:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn polyline(svg: &mut String, p: &Panel, pts: &[(f64, f64)], color: &str) {
    if pts.is_empty() {
        return;
    }
    let mut d = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        let _ = write!(
            d,
            "{}{},{}",
            if i == 0 { "" } else { " " },
            fnum(p.px(*x)),
            fnum(p.py(*y))
        );
    }
    let _ = write!(
        svg,
        r#"<polyline points="{d}" fill="none" stroke="{color}" stroke-width="1.2"/>"#
    );
}

fn scatter(svg: &mut String, p: &Panel, pts: &[(f64, f64)], color: &str) {
    for (x, y) in pts {
        let _ = write!(
            svg,
            r#"<circle cx="{}" cy="{}" r="2.5" fill="{color}"/>"#,
            fnum(p.px(*x)),
            fnum(p.py(*y))
        );
    }
}

fn bounds(pts: impl Iterator<Item = (f64, f64)>) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in pts {
        b.0 = b.0.min(x);
        b.1 = b.1.max(x);
        b.2 = b.2.min(y);
        b.3 = b.3.max(y);
    }
    let padx = (b.1 - b.0).abs().max(1e-9) * 0.05;
    let pady = (b.3 - b.2).abs().max(1e-9) * 0.05;
    (b.0 - padx, b.1 + padx, b.2 - pady, b.3 + pady)
}

fn open_svg(w: f64, h: f64) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {} {}" font-family="sans-serif">"#,
        fnum(w),
        fnum(h)
    )
}

/// Measured contact angle against the wetting potential, with the
/// least-squares line and its relative L2-norm error in the legend.
pub fn theta_mu_plot(samples: &[(f64, f64)], slope: f64, intercept: f64, l2_error: f64) -> String {
    let (xmin, xmax, ymin, ymax) = bounds(samples.iter().copied());
    let p = Panel {
        x0: 60.0,
        y0: 30.0,
        w: 420.0,
        h: 300.0,
        xmin,
        xmax,
        ymin,
        ymax,
    };
    let mut svg = open_svg(540.0, 390.0);
    draw_panel(
        &mut svg,
        &p,
        "wetting potential mu_s",
        "contact angle (deg)",
        "theta vs mu_s",
    );
    polyline(
        &mut svg,
        &p,
        &[
            (xmin, slope * xmin + intercept),
            (xmax, slope * xmax + intercept),
        ],
        "green",
    );
    scatter(&mut svg, &p, samples, "black");
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" font-size="11">fit: theta = {} mu + {}; E = {}</text>"#,
        fnum(p.x0 + 8.0),
        fnum(p.y0 + 14.0),
        fnum(slope),
        fnum(intercept),
        fnum(l2_error)
    );
    svg.push_str("</svg>");
    svg
}

fn series(rows: &[AngleRow], get: impl Fn(&AngleRow) -> Option<f64>) -> Vec<(f64, f64)> {
    rows.iter()
        .filter_map(|r| get(r).map(|v| (r.step as f64, v)))
        .collect()
}

/// Three-panel hysteresis figure: the angle difference, then each side's
/// angle and contact position.
pub fn hysteresis_plot(rows: &[AngleRow]) -> String {
    let dth: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| match (r.theta_adv_deg, r.theta_rec_deg) {
            (Some(a), Some(b)) => Some((r.step as f64, a - b)),
            _ => None,
        })
        .collect();
    let tha = series(rows, |r| r.theta_adv_deg);
    let xa = series(rows, |r| r.x_adv);
    let thr = series(rows, |r| r.theta_rec_deg);
    let xr = series(rows, |r| r.x_rec);

    let mut svg = open_svg(560.0, 3.0 * 250.0 + 60.0);
    let specs: [(&str, &[&[(f64, f64)]], &[&str]); 3] = [
        ("contact angle hysteresis theta_A - theta_R (deg)", &[&dth], &["purple"]),
        ("advancing: theta (deg, black) / x (blue)", &[&tha, &xa], &["black", "blue"]),
        ("receding: theta (deg, black) / x (blue)", &[&thr, &xr], &["black", "blue"]),
    ];
    for (i, (title, datasets, colors)) in specs.iter().enumerate() {
        let all = datasets.iter().flat_map(|d| d.iter().copied());
        let (xmin, xmax, _, _) = bounds(all.clone());
        // Primary series bounds drive the y axis; secondary is rescaled in.
        let (_, _, ymin, ymax) = bounds(datasets[0].iter().copied());
        let p = Panel {
            x0: 60.0,
            y0: 30.0 + i as f64 * 250.0,
            w: 440.0,
            h: 190.0,
            xmin,
            xmax,
            ymin,
            ymax,
        };
        draw_panel(&mut svg, &p, "step", "", title);
        for (d, c) in datasets.iter().zip(colors.iter()) {
            if *c == "blue" && !d.is_empty() {
                // Rescale the position series into the angle panel.
                let (_, _, smin, smax) = bounds(d.iter().copied());
                let remap: Vec<(f64, f64)> = d
                    .iter()
                    .map(|(x, v)| {
                        (
                            *x,
                            ymin + (v - smin) / (smax - smin).max(1e-12) * (ymax - ymin),
                        )
                    })
                    .collect();
                polyline(&mut svg, &p, &remap, c);
            } else {
                polyline(&mut svg, &p, d, c);
            }
        }
    }
    svg.push_str("</svg>");
    svg
}

/// Unbalanced Young's force series for both contact lines, with a boxcar
/// smoothing overlay.
pub fn force_plot(rows: &[AngleRow]) -> String {
    let fa = series(rows, |r| r.f_adv);
    let fr = series(rows, |r| r.f_rec);
    let smooth = |d: &[(f64, f64)]| -> Vec<(f64, f64)> {
        let k = 9usize;
        (0..d.len())
            .map(|i| {
                let lo = i.saturating_sub(k / 2);
                let hi = (i + k / 2 + 1).min(d.len());
                let m = d[lo..hi].iter().map(|p| p.1).sum::<f64>() / (hi - lo) as f64;
                (d[i].0, m)
            })
            .collect()
    };
    let mut svg = open_svg(560.0, 2.0 * 260.0 + 50.0);
    for (i, (name, d)) in [("advancing", &fa), ("receding", &fr)].iter().enumerate() {
        if d.is_empty() {
            continue;
        }
        let (xmin, xmax, ymin, ymax) = bounds(d.iter().copied());
        let p = Panel {
            x0: 60.0,
            y0: 30.0 + i as f64 * 260.0,
            w: 440.0,
            h: 200.0,
            xmin,
            xmax,
            ymin,
            ymax,
        };
        draw_panel(
            &mut svg,
            &p,
            "step",
            "F (lattice units)",
            &format!("unbalanced Young's force, {name}"),
        );
        polyline(&mut svg, &p, d, "blue");
        polyline(&mut svg, &p, &smooth(d), "purple");
        if ymin < 0.0 && ymax > 0.0 {
            polyline(&mut svg, &p, &[(xmin, 0.0), (xmax, 0.0)], "gray");
        }
    }
    svg.push_str("</svg>");
    svg
}
