//! Flat binary grid files: n and N as u64 LE, L as f64 LE, then N^n f64 LE
//! samples row-major. A one-line JSON sidecar `<path>.json` carries metadata.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::grid::{GridField, GridSpec};
use crate::error::{Error, Result};

const HEADER: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSidecar {
    pub dimension: usize,
    pub points: usize,
    pub box_len: f64,
    pub samples: usize,
    pub layout: String,
    pub l2_norm: f64,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_grid(path: &Path, field: &GridField) -> Result<()> {
    let spec = field.spec();
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(&(spec.dimension as u64).to_le_bytes())?;
    w.write_all(&(spec.points as u64).to_le_bytes())?;
    w.write_all(&spec.box_len.to_le_bytes())?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;

    let meta = GridSidecar {
        dimension: spec.dimension,
        points: spec.points,
        box_len: spec.box_len,
        samples: spec.len(),
        layout: "f64-le-row-major".into(),
        l2_norm: field.l2_norm(),
    };
    let line = serde_json::to_string(&meta).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(sidecar_path(path), line + "\n")?;
    Ok(())
}

pub fn read_grid(path: &Path) -> Result<GridField> {
    let bytes = fs::read(path)?;
    if bytes.len() < HEADER {
        return Err(Error::Io(format!("{}: truncated header", path.display())));
    }
    let word = |i: usize| <[u8; 8]>::try_from(&bytes[8 * i..8 * i + 8]).expect("8-byte slice");
    let dimension = u64::from_le_bytes(word(0)) as usize;
    let points = u64::from_le_bytes(word(1)) as usize;
    let box_len = f64::from_le_bytes(word(2));
    let spec = GridSpec::new(dimension, box_len, points)?;
    let body = &bytes[HEADER..];
    if body.len() != 8 * spec.len() {
        return Err(Error::Io(format!(
            "{}: expected {} samples, found {} bytes",
            path.display(),
            spec.len(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    GridField::new(spec, values)
}

pub fn read_sidecar(path: &Path) -> Result<GridSidecar> {
    let text = fs::read_to_string(sidecar_path(path))?;
    serde_json::from_str(text.trim()).map_err(|e| Error::Io(e.to_string()))
}
