//! Coefficient files and checkpoints.
//!
//! Coefficient file layout (all little-endian):
//!
//! ```text
//! u64 nx, u64 ny, u64 nz
//! 4 × nx·ny·nz × (f64 re, f64 im)   fields v₁, v₂, w, θ in that order
//! ```
//!
//! Each field is stored in row-major FFT index order: index `(i, j, l)` with
//! `l` fastest, where index `i` holds mode `i` for `i < nx/2` and `i − nx`
//! otherwise. The `w` block is ignored when the file is used as initial data
//! because `w` is always diagnosed from `v`.
//!
//! A checkpoint is a coefficient file plus a TOML manifest next to it.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, Parity, SpectralField};
use crate::state::State;

const PARITIES: [Parity; 4] = [Parity::Even, Parity::Even, Parity::Odd, Parity::Odd];

pub fn write_coefficients(path: &Path, fields: [&SpectralField; 4]) -> Result<()> {
    let grid = fields[0].grid();
    if fields.iter().any(|f| f.grid() != grid) {
        return Err(Error::GridMismatch(
            "coefficient file fields must share a grid".into(),
        ));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(|e| Error::io(path, e));
    for n in [grid.nx(), grid.ny(), grid.nz()] {
        put(&(n as u64).to_le_bytes())?;
    }
    for f in fields {
        for c in f.coeffs().as_standard_layout().iter() {
            put(&c.re.to_le_bytes())?;
            put(&c.im.to_le_bytes())?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read the four fields of a coefficient file with the standard parities
/// (v even, w and θ odd).
pub fn read_coefficients(path: &Path) -> Result<[SpectralField; 4]> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut buf = [0u8; 8];
    let mut next = |what: &str| -> Result<[u8; 8]> {
        r.read_exact(&mut buf).map_err(|_| {
            Error::Format(format!(
                "{}: truncated while reading {what}",
                path.display()
            ))
        })?;
        Ok(buf)
    };
    let mut dims = [0usize; 3];
    for d in &mut dims {
        let n = u64::from_le_bytes(next("header")?);
        *d = usize::try_from(n)
            .map_err(|_| Error::Format(format!("{}: grid size {n} too large", path.display())))?;
    }
    let grid = Grid::new(dims[0], dims[1], dims[2])
        .map_err(|e| Error::Format(format!("{}: bad header: {e}", path.display())))?;
    let mut out = Vec::with_capacity(4);
    for parity in PARITIES {
        let mut coeffs = Array3::<Complex64>::zeros(grid.shape());
        for c in coeffs.iter_mut() {
            let re = f64::from_le_bytes(next("coefficients")?);
            let im = f64::from_le_bytes(next("coefficients")?);
            *c = Complex64::new(re, im);
        }
        let f = SpectralField::from_coeffs(grid, coeffs, parity)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        out.push(f);
    }
    if r.read(&mut buf).map_err(|e| Error::io(path, e))? != 0 {
        return Err(Error::Format(format!(
            "{}: trailing bytes after four fields",
            path.display()
        )));
    }
    Ok(out.try_into().expect("exactly four fields"))
}

/// Metadata stored next to a checkpoint's coefficient file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointManifest {
    pub t: f64,
    pub eps: Option<f64>,
    pub dt: f64,
    pub scheme: String,
    pub solver: String,
    pub steps: usize,
    pub config_hash: String,
    /// Coefficient file name, relative to the manifest.
    pub coefficients: String,
}

/// Write `<dir>/<stem>.bin` and `<dir>/<stem>.toml`; returns the manifest path.
pub fn write_checkpoint(
    dir: &Path,
    stem: &str,
    state: &State,
    manifest: &CheckpointManifest,
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let bin = dir.join(format!("{stem}.bin"));
    write_coefficients(&bin, state.fields())?;
    let mut m = manifest.clone();
    m.coefficients = format!("{stem}.bin");
    m.t = state.time;
    let text = toml::to_string(&m).map_err(|e| Error::Format(e.to_string()))?;
    let path = dir.join(format!("{stem}.toml"));
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn read_checkpoint(manifest_path: &Path) -> Result<(State, CheckpointManifest)> {
    let text = std::fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let m: CheckpointManifest = toml::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {}", manifest_path.display(), e.message())))?;
    let bin = manifest_path
        .parent()
        .unwrap_or(Path::new("."))
        .join(&m.coefficients);
    let [v1, v2, w, theta] = read_coefficients(&bin)?;
    Ok((
        State {
            v: [v1, v2],
            w,
            theta,
            time: m.t,
        },
        m,
    ))
}
