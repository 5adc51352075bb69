//! Binary state snapshots.
//!
//! Little-endian throughout: the 8-byte magic `CLSNAP01`, `M` as `u64`,
//! `L` and `t` as `f64`, then `M` coefficients as `(re, im)` pairs of `f64`
//! in FFT order.

use std::fs;
use std::path::Path;

use chenlee_core::{Complex64, Grid, SpectralField};

use crate::error::{LabError, Result};

pub const MAGIC: &[u8; 8] = b"CLSNAP01";
pub const HEADER_LEN: usize = 32;

pub fn encode(u: &SpectralField, t: f64) -> Vec<u8> {
    let g = u.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.modes());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.modes() as u64).to_le_bytes());
    out.extend_from_slice(&g.half_length().to_le_bytes());
    out.extend_from_slice(&t.to_le_bytes());
    for c in u.coeffs() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode(bytes: &[u8]) -> Result<(SpectralField, f64)> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(LabError::Snapshot("missing CLSNAP01 header".into()));
    }
    let m = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let l = f64_at(bytes, 16);
    let t = f64_at(bytes, 24);
    let expected = m.checked_mul(16).and_then(|n| n.checked_add(HEADER_LEN));
    if expected != Some(bytes.len()) {
        return Err(LabError::Snapshot(format!("{} bytes do not hold {m} coefficients", bytes.len())));
    }
    let grid = Grid::new(l, m)?;
    let coeffs = (0..m)
        .map(|k| {
            let at = HEADER_LEN + 16 * k;
            Complex64::new(f64_at(bytes, at), f64_at(bytes, at + 8))
        })
        .collect();
    Ok((SpectralField::from_coeffs(&grid, coeffs)?, t))
}

pub fn write(path: &Path, u: &SpectralField, t: f64) -> Result<()> {
    fs::write(path, encode(u, t)).map_err(|e| LabError::io(path, e))
}

pub fn read(path: &Path) -> Result<(SpectralField, f64)> {
    decode(&fs::read(path).map_err(|e| LabError::io(path, e))?)
}
