//! Field serialization.
//!
//! Binary layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `SQGF` |
//! | 4     | layout tag (u32), [`LAYOUT_ROW_MAJOR_COMPLEX`] |
//! | 8     | n_per_dim (u64) |
//! | 8     | period (f64) |
//! | 8     | dealias fraction (f64) |
//! | 16·n² | coefficients as interleaved (re, im) f64 pairs, row-major over (i1, i2) |

use std::io::{Read, Write};

use ndarray::Array2;
use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::GridSpec;
use crate::error::{Result, SqgError};

pub const MAGIC: &[u8; 4] = b"SQGF";
pub const LAYOUT_ROW_MAJOR_COMPLEX: u32 = 1;

pub fn write_field<W: Write>(field: &SpectralField, mut w: W) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&LAYOUT_ROW_MAJOR_COMPLEX.to_le_bytes())?;
    w.write_all(&(g.n() as u64).to_le_bytes())?;
    w.write_all(&g.period().to_le_bytes())?;
    w.write_all(&g.dealias_fraction().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * g.len());
    for c in field.as_slice() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_field<R: Read>(mut r: R) -> Result<SpectralField> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(SqgError::Format("not a field container (bad magic)".into()));
    }
    let layout = u32::from_le_bytes(read_array(&mut r)?);
    if layout != LAYOUT_ROW_MAJOR_COMPLEX {
        return Err(SqgError::Format(format!("unsupported layout tag {layout}")));
    }
    let n = u64::from_le_bytes(read_array(&mut r)?);
    let period = f64::from_le_bytes(read_array(&mut r)?);
    let fraction = f64::from_le_bytes(read_array(&mut r)?);
    if n > 1 << 15 {
        return Err(SqgError::Format(format!("grid size {n} is implausible")));
    }
    let grid = GridSpec::new(n as usize, period, fraction)?;
    let mut payload = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut payload)?;
    let coeffs: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|ch| {
            let re = f64::from_le_bytes(ch[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(ch[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(SqgError::Format("trailing bytes after payload".into()));
    }
    SpectralField::from_coeffs(
        grid,
        Array2::from_shape_vec((grid.n(), grid.n()), coeffs).expect("shape"),
    )
}

/// `k1,k2,re,im` rows for every mode with signed lattice indices.
pub fn write_field_csv<W: Write>(field: &SpectralField, mut w: W) -> Result<()> {
    let g = field.grid();
    writeln!(w, "k1,k2,re,im")?;
    for ((i1, i2), c) in field.coeffs().indexed_iter() {
        writeln!(w, "{},{},{:e},{:e}", g.signed_index(i1), g.signed_index(i2), c.re, c.im)?;
    }
    Ok(())
}

/// Parses the CSV form back onto `grid`; absent modes are zero.
pub fn read_field_csv<R: Read>(grid: GridSpec, mut r: R) -> Result<SpectralField> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut out = SpectralField::zeros(grid);
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(SqgError::Format(format!("line {}: expected 4 columns", lineno + 1)));
        }
        let bad = |e: &dyn std::fmt::Display| SqgError::Format(format!("line {}: {e}", lineno + 1));
        let m1: i64 = parts[0].trim().parse().map_err(|e| bad(&e))?;
        let m2: i64 = parts[1].trim().parse().map_err(|e| bad(&e))?;
        let re: f64 = parts[2].trim().parse().map_err(|e| bad(&e))?;
        let im: f64 = parts[3].trim().parse().map_err(|e| bad(&e))?;
        let half = (grid.n() / 2) as i64;
        if !(-half..half).contains(&m1) || !(-half..half).contains(&m2) {
            return Err(SqgError::Format(format!(
                "line {}: mode ({m1},{m2}) outside lattice",
                lineno + 1
            )));
        }
        out.coeffs_mut()[[grid.storage_index(m1), grid.storage_index(m2)]] = Complex64::new(re, im);
    }
    Ok(out)
}
