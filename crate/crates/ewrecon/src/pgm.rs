//! Binary PGM (P5, 8-bit) export for visual inspection.

use std::fs;
use std::path::Path;

use crate::grid::{GridError, RealGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmScaling {
    /// Map the data range [min, max] to [0, 255]; a constant grid maps to 0.
    MinMax,
    /// Treat values as already lying in [0, 1]; out-of-range values clamp.
    Absolute01,
}

pub fn pgm_bytes(grid: &RealGrid, scaling: PgmScaling) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.width(), grid.height()).into_bytes();
    match scaling {
        PgmScaling::MinMax => {
            let min = grid.data().iter().cloned().fold(f64::INFINITY, f64::min);
            let max = grid.data().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let range = max - min;
            for &v in grid.data() {
                let byte = if range > 0.0 {
                    ((v - min) / range * 255.0).round() as u8
                } else {
                    0
                };
                out.push(byte);
            }
        }
        PgmScaling::Absolute01 => {
            for &v in grid.data() {
                out.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
            }
        }
    }
    out
}

pub fn export_pgm(grid: &RealGrid, path: &Path, scaling: PgmScaling) -> Result<(), GridError> {
    fs::write(path, pgm_bytes(grid, scaling))?;
    Ok(())
}
