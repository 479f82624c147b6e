//! Checkpoints: one JSON header line followed by raw little-endian `f64` levels.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, VectorField3};

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    schema_version: u32,
    half_width: f64,
    points_per_axis: usize,
    ghost_layers: usize,
    /// Time of the last level.
    t: f64,
    dt: f64,
    levels: usize,
    /// Components per level, each a padded C-order array.
    components: usize,
}

/// Consecutive time levels `t - (levels - 1) dt, ..., t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    pub dt: f64,
    pub levels: Vec<VectorField3>,
}

impl Checkpoint {
    pub fn grid(&self) -> Option<&Grid> {
        self.levels.first().map(|l| l.grid())
    }
}

pub fn write_checkpoint(path: &Path, t: f64, dt: f64, levels: &[VectorField3]) -> Result<()> {
    let grid = match levels.first() {
        Some(l) => *l.grid(),
        None => return Err(Error::InvalidParams("a checkpoint needs at least one level".into())),
    };
    if levels.iter().any(|l| *l.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let header = Header {
        schema_version: CHECKPOINT_SCHEMA_VERSION,
        half_width: grid.half_width(),
        points_per_axis: grid.points_per_axis(),
        ghost_layers: grid.ghost_layers(),
        t,
        dt,
        levels: levels.len(),
        components: 3,
    };
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for level in levels {
        for c in 0..3 {
            for v in level.component_slice(c) {
                out.write_all(&v.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut input = BufReader::new(File::open(path)?);
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: Header = serde_json::from_str(line.trim_end())?;
    if header.schema_version != CHECKPOINT_SCHEMA_VERSION || header.components != 3 {
        return Err(Error::Config(format!(
            "unsupported checkpoint (schema {}, {} components)",
            header.schema_version, header.components
        )));
    }
    let grid = Grid::new(header.half_width, header.points_per_axis, header.ghost_layers)?;
    let mut buf = [0u8; 8];
    let mut levels = Vec::with_capacity(header.levels);
    for _ in 0..header.levels {
        let mut level = VectorField3::zeros(grid);
        for c in 0..3 {
            for v in level.component_slice_mut(c) {
                input.read_exact(&mut buf)?;
                *v = f64::from_le_bytes(buf);
            }
        }
        levels.push(level);
    }
    if input.read(&mut buf)? != 0 {
        return Err(Error::Config("trailing bytes after the last checkpoint level".into()));
    }
    Ok(Checkpoint {
        t: header.t,
        dt: header.dt,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid::new(2.0, 9, 2).unwrap();
        let a = VectorField3::from_fn(g, |x| [x[0].sin(), 1.0 / 3.0, x[2] * 1e-300]);
        let b = a.scaled(-0.7);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.ckpt");
        write_checkpoint(&path, 1.25, 0.05, &[a.clone(), b.clone()]).unwrap();
        let back = read_checkpoint(&path).unwrap();
        assert_eq!(back.t, 1.25);
        assert_eq!(back.dt, 0.05);
        assert_eq!(back.levels, vec![a, b]);
        assert_eq!(back.grid(), Some(&g));
    }

    #[test]
    fn header_is_one_json_line() {
        let g = Grid::new(1.0, 5, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.ckpt");
        write_checkpoint(&path, 0.0, 0.1, &[VectorField3::zeros(g)]).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let nl = bytes.iter().position(|&b| b == b'\n').unwrap();
        let v: serde_json::Value = serde_json::from_slice(&bytes[..nl]).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(bytes.len() - nl - 1, 3 * g.storage_len() * 8);
        std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
        assert!(read_checkpoint(&path).is_err());
        assert!(write_checkpoint(&path, 0.0, 0.1, &[]).is_err());
    }
}
