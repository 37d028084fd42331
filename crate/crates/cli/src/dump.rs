//! CAPL1 binary field dumps: a small header followed by row-major f64
//! little-endian values. Round-trips are bit exact.
//!
//! Layout: magic "CAPL1", u32 nx, u32 ny, u64 step, f64 t_r, u16 name length,
//! name bytes (UTF-8), then nx*ny values.

use std::io::{self, Read, Write};

pub const MAGIC: &[u8; 5] = b"CAPL1";

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub nx: u32,
    pub ny: u32,
    pub step: u64,
    pub t_r: f64,
    pub name: String,
    pub values: Vec<f64>,
}

impl FieldDump {
    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        assert_eq!(self.values.len(), (self.nx * self.ny) as usize);
        w.write_all(MAGIC)?;
        w.write_all(&self.nx.to_le_bytes())?;
        w.write_all(&self.ny.to_le_bytes())?;
        w.write_all(&self.step.to_le_bytes())?;
        w.write_all(&self.t_r.to_le_bytes())?;
        let name = self.name.as_bytes();
        w.write_all(&(name.len() as u16).to_le_bytes())?;
        w.write_all(name)?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> io::Result<Self> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("bad magic {magic:?}, expected CAPL1"),
            ));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let nx = u32::from_le_bytes(b4);
        r.read_exact(&mut b4)?;
        let ny = u32::from_le_bytes(b4);
        r.read_exact(&mut b8)?;
        let step = u64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let t_r = f64::from_le_bytes(b8);
        let mut b2 = [0u8; 2];
        r.read_exact(&mut b2)?;
        let name_len = u16::from_le_bytes(b2) as usize;
        let mut name = vec![0u8; name_len];
        r.read_exact(&mut name)?;
        let name = String::from_utf8(name)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        let count = nx as usize * ny as usize;
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut b8)?;
            values.push(f64::from_le_bytes(b8));
        }
        Ok(Self {
            nx,
            ny,
            step,
            t_r,
            name,
            values,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)
    }

    pub fn load(path: &std::path::Path) -> io::Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dump = FieldDump {
            nx: 7,
            ny: 3,
            step: 123456789,
            t_r: 0.6,
            name: "rho".into(),
            values: (0..21)
                .map(|i| (i as f64).sqrt() * 1.0e-3 + f64::EPSILON * i as f64)
                .collect(),
        };
        let mut buf = Vec::new();
        dump.write_to(&mut buf).unwrap();
        let back = FieldDump::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(dump, back);
        for (a, b) in dump.values.iter().zip(back.values.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_bad_magic() {
        let buf = b"NOPE!aaaaaaaaaaaaaaaaaaaaaaa".to_vec();
        assert!(FieldDump::read_from(&mut buf.as_slice()).is_err());
    }
}
