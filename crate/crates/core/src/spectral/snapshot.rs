use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;

use crate::error::{CbfError, Result};
use crate::scalar::Real;
use crate::spectral::field::SpectralField;
use crate::spectral::grid::TorusGrid;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"CBFSNAP1";

/// Parameters stored alongside a snapshot so a restart can be checked
/// against the configuration that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotHeader {
    pub dim: u64,
    pub n_points: u64,
    pub period: f64,
    pub time: f64,
    pub r: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Writes the header followed by each component's coefficients in row-major
/// order as little-endian `f64` (re, im) pairs.
pub fn write_snapshot_to<T: Real>(
    mut w: impl Write,
    header: &SnapshotHeader,
    field: &SpectralField<T>,
) -> std::io::Result<()> {
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&header.dim.to_le_bytes())?;
    w.write_all(&header.n_points.to_le_bytes())?;
    for v in [
        header.period,
        header.time,
        header.r,
        header.mu,
        header.alpha,
        header.beta,
    ] {
        w.write_all(&v.to_le_bytes())?;
    }
    for comp in field.coefficients() {
        for z in comp {
            w.write_all(&z.re.to_f64_lossy().to_le_bytes())?;
            w.write_all(&z.im.to_f64_lossy().to_le_bytes())?;
        }
    }
    w.flush()
}

pub fn write_snapshot<T: Real>(path: &Path, header: &SnapshotHeader, field: &SpectralField<T>) -> Result<()> {
    let io = |source| CbfError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    write_snapshot_to(BufWriter::new(file), header, field).map_err(io)
}

fn read_u64(r: &mut impl Read) -> std::io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> std::io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Reads a snapshot and rebuilds its grid. Returns the header and the field.
pub fn read_snapshot_from<T: Real>(mut r: impl Read) -> Result<(SnapshotHeader, SpectralField<T>)> {
    let fmt = |e: std::io::Error| CbfError::SnapshotFormat(format!("truncated snapshot: {e}"));
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(fmt)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(CbfError::SnapshotFormat(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&magic),
            String::from_utf8_lossy(SNAPSHOT_MAGIC)
        )));
    }
    let dim = read_u64(&mut r).map_err(fmt)?;
    let n_points = read_u64(&mut r).map_err(fmt)?;
    let mut vals = [0f64; 6];
    for v in &mut vals {
        *v = read_f64(&mut r).map_err(fmt)?;
    }
    let header = SnapshotHeader {
        dim,
        n_points,
        period: vals[0],
        time: vals[1],
        r: vals[2],
        mu: vals[3],
        alpha: vals[4],
        beta: vals[5],
    };
    if dim > 3 || n_points > 4096 {
        return Err(CbfError::SnapshotFormat(format!(
            "implausible grid dim={dim} n_points={n_points}"
        )));
    }
    let grid = TorusGrid::new(dim as usize, n_points as usize, T::lit(header.period))?;
    let mut coefficients = Vec::with_capacity(grid.dim());
    for _ in 0..grid.dim() {
        let mut comp = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = read_f64(&mut r).map_err(fmt)?;
            let im = read_f64(&mut r).map_err(fmt)?;
            comp.push(Complex::new(T::lit(re), T::lit(im)));
        }
        coefficients.push(comp);
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra).map_err(fmt)? != 0 {
        return Err(CbfError::SnapshotFormat("trailing bytes after coefficients".into()));
    }
    let field = SpectralField::new(grid, coefficients)?;
    field.check_hermitian()?;
    Ok((header, field))
}

pub fn read_snapshot<T: Real>(path: &Path) -> Result<(SnapshotHeader, SpectralField<T>)> {
    let file = File::open(path).map_err(|source| CbfError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_snapshot_from(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> SnapshotHeader {
        SnapshotHeader {
            dim: 2,
            n_points: 8,
            period: std::f64::consts::TAU,
            time: 0.5,
            r: 4.0,
            mu: 0.1,
            alpha: 0.0,
            beta: 1.0,
        }
    }

    #[test]
    fn round_trip_is_bitwise() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 8).unwrap();
        let a = [
            Complex::new(0.1f64.sqrt(), -1.0 / 3.0),
            Complex::new(2.0f64.ln(), 1e-300),
        ];
        let u = SpectralField::single_mode(&g, &[1, 2], &a).unwrap();
        let mut buf = Vec::new();
        write_snapshot_to(&mut buf, &header(), &u).unwrap();
        assert_eq!(buf.len(), 8 + 8 * 8 + 2 * 64 * 16);
        let (h, v) = read_snapshot_from::<f64>(buf.as_slice()).unwrap();
        assert_eq!(h, header());
        for (x, y) in u.coefficients().iter().flatten().zip(v.coefficients().iter().flatten()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 8).unwrap();
        let mut buf = Vec::new();
        write_snapshot_to(&mut buf, &header(), &SpectralField::zeros(&g)).unwrap();
        let mut bad = buf.clone();
        bad[7] = b'2';
        assert!(matches!(
            read_snapshot_from::<f64>(bad.as_slice()),
            Err(CbfError::SnapshotFormat(_))
        ));
        buf.truncate(buf.len() - 3);
        assert!(matches!(
            read_snapshot_from::<f64>(buf.as_slice()),
            Err(CbfError::SnapshotFormat(_))
        ));
    }
}
