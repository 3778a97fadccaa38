//! SPNF binary field files.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! "SPNF"          magic
//! u32             version (1 or 2)
//! u8              ndim
//! u32 x ndim      points per axis
//! f64 x ndim      box length per axis
//! f64             mass
//! u8              representation (0 position, 1 momentum)
//! u8              components per point (version 2 only; version 1 means 4)
//! f64 pairs       (re, im), component innermost, grid index row-major
//! ```
//!
//! Four-component fields are written as version 1; one-component fields
//! as version 2.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{DiracError, Result};
use crate::field::{GridField, Rep};
use crate::grid::GridSpec;

pub const MAGIC: &[u8; 4] = b"SPNF";

pub fn write_field<const NC: usize, W: Write>(w: &mut W, f: &GridField<NC>) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    let version: u32 = if NC == 4 { 1 } else { 2 };
    w.write_all(&version.to_le_bytes())?;
    w.write_all(&[g.ndim() as u8])?;
    for a in 0..g.ndim() {
        w.write_all(&(g.n(a) as u32).to_le_bytes())?;
    }
    for a in 0..g.ndim() {
        w.write_all(&g.length(a).to_le_bytes())?;
    }
    w.write_all(&g.mass().to_le_bytes())?;
    w.write_all(&[match f.rep() {
        Rep::Position => 0,
        Rep::Momentum => 1,
    }])?;
    if version == 2 {
        w.write_all(&[NC as u8])?;
    }
    let mut buf = Vec::with_capacity(16 * f.data().len());
    for v in f.data() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_array<const K: usize, R: Read>(r: &mut R) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_field<const NC: usize, R: Read>(r: &mut R) -> Result<GridField<NC>> {
    if &read_array::<4, _>(r)? != MAGIC {
        return Err(DiracError::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(r)?);
    if version != 1 && version != 2 {
        return Err(DiracError::Format(format!("unsupported version {version}")));
    }
    let ndim = read_array::<1, _>(r)?[0] as usize;
    if !(1..=3).contains(&ndim) {
        return Err(DiracError::Format(format!("ndim {ndim}")));
    }
    let mut n = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        n.push(u32::from_le_bytes(read_array(r)?) as usize);
    }
    let mut len = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        len.push(f64::from_le_bytes(read_array(r)?));
    }
    let mass = f64::from_le_bytes(read_array(r)?);
    let rep = match read_array::<1, _>(r)?[0] {
        0 => Rep::Position,
        1 => Rep::Momentum,
        x => return Err(DiracError::Format(format!("representation flag {x}"))),
    };
    let ncomp = if version == 1 { 4 } else { read_array::<1, _>(r)?[0] as usize };
    if ncomp != NC {
        return Err(DiracError::Format(format!("file has {ncomp} components, expected {NC}")));
    }
    let grid = GridSpec::new(ndim, &n, &len, mass).map_err(|e| DiracError::Format(e.to_string()))?;
    let mut raw = vec![0u8; 16 * NC * grid.len()];
    r.read_exact(&mut raw)?;
    let data = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap_or_default());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap_or_default());
            Complex64::new(re, im)
        })
        .collect();
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(DiracError::Format("trailing bytes".into()));
    }
    GridField::new(grid, rep, data)
}

pub fn save<const NC: usize>(path: impl AsRef<Path>, f: &GridField<NC>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn load<const NC: usize>(path: impl AsRef<Path>) -> Result<GridField<NC>> {
    read_field(&mut BufReader::new(File::open(path)?))
}
