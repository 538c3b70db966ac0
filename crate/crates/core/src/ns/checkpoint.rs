//! Binary checkpoints.
//!
//! Layout, all little-endian:
//!
//! ```text
//! b"LPNS1"
//! n      u64
//! nu     f64
//! time   f64
//! 3 x n^3 x (re f64, im f64)
//! ```
//!
//! Coefficients of each component are stored for `xi_1, xi_2, xi_3` running
//! over `-n/2 ..= n/2 - 1`, with `xi_1` outermost and `xi_3` fastest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::state::VelocityState;
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

pub const MAGIC: &[u8; 5] = b"LPNS1";

fn lexicographic(grid: Grid) -> impl Iterator<Item = usize> {
    let n = grid.n() as i64;
    let h = n / 2;
    (0..grid.len()).map(move |l| {
        let l = l as i64;
        let xi = [l / (n * n) - h, (l / n) % n - h, l % n - h];
        grid.index_of(xi).expect("lattice wavevector")
    })
}

pub fn write_to(state: &VelocityState, w: &mut impl Write) -> Result<()> {
    let grid = state.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(grid.n() as u64).to_le_bytes())?;
    w.write_all(&state.nu().to_le_bytes())?;
    w.write_all(&state.time().to_le_bytes())?;
    for c in state.components() {
        for i in lexicographic(grid) {
            let z = c.coeffs()[i];
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u64(r: &mut impl Read) -> Result<[u8; 8]> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|e| Error::Checkpoint(format!("truncated file: {e}")))?;
    Ok(b)
}

pub fn read_from(r: &mut impl Read) -> Result<VelocityState> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Checkpoint("missing header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint(format!("bad magic {magic:?}")));
    }
    let n = u64::from_le_bytes(read_u64(r)?);
    let grid = usize::try_from(n)
        .ok()
        .and_then(|n| Grid::new(n).ok())
        .ok_or_else(|| Error::Checkpoint(format!("invalid grid size {n}")))?;
    let nu = f64::from_le_bytes(read_u64(r)?);
    let time = f64::from_le_bytes(read_u64(r)?);
    let mut comps = Vec::with_capacity(3);
    for _ in 0..3 {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        for i in lexicographic(grid) {
            let re = f64::from_le_bytes(read_u64(r)?);
            let im = f64::from_le_bytes(read_u64(r)?);
            coeffs[i] = Complex64::new(re, im);
        }
        comps.push(SpectralField::from_coeffs(grid, coeffs)?);
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Checkpoint("trailing bytes after coefficients".into()));
    }
    let comps: [SpectralField; 3] = comps.try_into().expect("three components");
    VelocityState::new(comps, time, nu).map_err(|e| Error::Checkpoint(e.to_string()))
}

pub fn write_checkpoint(state: &VelocityState, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_to(state, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<VelocityState> {
    let mut r = BufReader::new(File::open(path)?);
    read_from(&mut r)
}
