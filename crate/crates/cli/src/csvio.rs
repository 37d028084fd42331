//! Angle-series CSV output. Columns are stable; missing sides are empty
//! cells. The physical-time column is nominal (a fixed seconds-per-step
//! constant for presentation); lattice steps are the ground truth.

use capl_core::measure::AnglePair;
use std::io::{self, BufRead, Write};

/// Nominal seconds per lattice step used for the presentation time column.
pub const NOMINAL_SECONDS_PER_STEP: f64 = 2.0e-5;

pub const HEADER_COMMENT: &str = "# capl-angle-series schema=1 time_phys_s=nominal";
pub const COLUMNS: &str =
    "step,time_phys_s,theta_adv_deg,x_adv,theta_rec_deg,x_rec,theta_eq_adv,theta_eq_rec,F_adv,F_rec";

fn cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

pub fn write_angle_series(pairs: &[AnglePair], w: &mut impl Write) -> io::Result<()> {
    writeln!(w, "{HEADER_COMMENT}")?;
    writeln!(w, "{COLUMNS}")?;
    for p in pairs {
        let t = p.step as f64 * NOMINAL_SECONDS_PER_STEP;
        let (ta, xa, ea, fa) = match &p.advancing {
            Some(s) => (cell(s.theta_deg), cell(s.contact[0]), cell(s.theta_eq_deg), cell(s.young_force)),
            None => Default::default(),
        };
        let (tr, xr, er, fr) = match &p.receding {
            Some(s) => (cell(s.theta_deg), cell(s.contact[0]), cell(s.theta_eq_deg), cell(s.young_force)),
            None => Default::default(),
        };
        writeln!(w, "{},{},{ta},{xa},{tr},{xr},{ea},{er},{fa},{fr}", p.step, cell(t))?;
    }
    Ok(())
}

pub fn save_angle_series(pairs: &[AnglePair], path: &std::path::Path) -> io::Result<()> {
    let mut f = io::BufWriter::new(std::fs::File::create(path)?);
    write_angle_series(pairs, &mut f)
}

/// A parsed angle-series row; empty cells come back as None.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AngleRow {
    pub step: u64,
    pub time_phys_s: Option<f64>,
    pub theta_adv_deg: Option<f64>,
    pub x_adv: Option<f64>,
    pub theta_rec_deg: Option<f64>,
    pub x_rec: Option<f64>,
    pub theta_eq_adv: Option<f64>,
    pub theta_eq_rec: Option<f64>,
    pub f_adv: Option<f64>,
    pub f_rec: Option<f64>,
}

pub fn read_angle_series(r: &mut impl BufRead) -> io::Result<Vec<AngleRow>> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for line in r.lines() {
        let line = line?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line.trim() != COLUMNS {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("unexpected column header: {line}"),
                ));
            }
            saw_header = true;
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 10 {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("expected 10 cells, got {}: {line}", cells.len()),
            ));
        }
        let opt = |s: &str| -> Option<f64> {
            if s.is_empty() {
                None
            } else {
                s.parse().ok()
            }
        };
        rows.push(AngleRow {
            step: cells[0].parse().map_err(|e| {
                io::Error::new(io::ErrorKind::InvalidData, format!("bad step: {e}"))
            })?,
            time_phys_s: opt(cells[1]),
            theta_adv_deg: opt(cells[2]),
            x_adv: opt(cells[3]),
            theta_rec_deg: opt(cells[4]),
            x_rec: opt(cells[5]),
            theta_eq_adv: opt(cells[6]),
            theta_eq_rec: opt(cells[7]),
            f_adv: opt(cells[8]),
            f_rec: opt(cells[9]),
        });
    }
    if !saw_header {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "missing column header"));
    }
    Ok(rows)
}

pub fn load_angle_series(path: &std::path::Path) -> io::Result<Vec<AngleRow>> {
    let mut f = io::BufReader::new(std::fs::File::open(path)?);
    read_angle_series(&mut f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use capl_core::measure::{AngleSample, Side};

    #[test]
    fn empty_series_is_header_only() {
        let mut buf = Vec::new();
        write_angle_series(&[], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        let rows = read_angle_series(&mut buf.as_slice()).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn round_trip_with_gap() {
        let sample = AngleSample {
            step: 500,
            side: Side::Advancing,
            theta_deg: 117.25,
            contact: [42.5, 16.0],
            arc_s: 43.0,
            alpha_deg: -3.0,
            theta_eq_deg: 120.0,
            young_force: -0.01,
        };
        let pairs = vec![
            AnglePair {
                step: 500,
                advancing: Some(sample),
                receding: None,
            },
            AnglePair {
                step: 1000,
                advancing: None,
                receding: None,
            },
        ];
        let mut buf = Vec::new();
        write_angle_series(&pairs, &mut buf).unwrap();
        let rows = read_angle_series(&mut buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].step, 500);
        assert_eq!(rows[0].theta_adv_deg, Some(117.25));
        assert_eq!(rows[0].theta_rec_deg, None);
        assert_eq!(rows[0].f_adv, Some(-0.01));
        assert_eq!(rows[1].theta_adv_deg, None);
        // Nominal time column present.
        assert!((rows[0].time_phys_s.unwrap() - 0.01).abs() < 1e-12);
    }
}
