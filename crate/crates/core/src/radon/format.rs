//! Tomogram files: a JSON manifest plus one CSV or little-endian float64 block per direction.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Route, Tomogram};
use crate::error::{Error, Result};
use crate::io::{f64_block, fmt_f64, parse_csv_row, read_f64_block, write_atomic};
use crate::metaplectic::RotationParams;
use crate::numerics::Axis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockFormat {
    /// Two columns `X,R` with a header line.
    Csv,
    /// Raw `R` values.
    F64le,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub mu: f64,
    pub nu: f64,
    pub theta: f64,
    pub file: String,
    #[serde(default)]
    pub warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomogramManifest {
    pub hbar: f64,
    pub x_axis: Axis,
    pub route: Route,
    pub format: BlockFormat,
    pub blocks: Vec<BlockEntry>,
}

/// Writes `<stem>.json` and `<stem>_NNNN.{csv,f64}` into `dir`; returns the manifest path.
pub fn save_tomograms(dir: &Path, stem: &str, tomos: &[Tomogram], format: BlockFormat) -> Result<PathBuf> {
    let first = tomos
        .first()
        .ok_or_else(|| Error::Domain("nothing to save".into()))?;
    let axis = first.axis();
    let mut blocks = Vec::with_capacity(tomos.len());
    for (k, t) in tomos.iter().enumerate() {
        if !t.axis().approx_eq(&axis, 1e-12) || t.hbar() != first.hbar() {
            return Err(Error::Shape("tomograms in one manifest must share the X axis and hbar".into()));
        }
        let (file, bytes) = match format {
            BlockFormat::Csv => {
                let mut buf = Vec::new();
                writeln!(buf, "X,R")?;
                for (j, v) in t.values().iter().enumerate() {
                    writeln!(buf, "{},{}", fmt_f64(axis.point(j)), fmt_f64(*v))?;
                }
                (format!("{stem}_{k:04}.csv"), buf)
            }
            BlockFormat::F64le => (format!("{stem}_{k:04}.f64"), f64_block(t.values())),
        };
        write_atomic(&dir.join(&file), &bytes)?;
        blocks.push(BlockEntry {
            mu: t.mu(),
            nu: t.nu(),
            theta: t.params().theta(),
            file,
            warning: t.warning(),
        });
    }
    let route = if tomos.iter().all(|t| t.route() == first.route()) {
        first.route()
    } else {
        Route::Mixture
    };
    let manifest = TomogramManifest {
        hbar: first.hbar(),
        x_axis: axis,
        route,
        format,
        blocks,
    };
    let path = dir.join(format!("{stem}.json"));
    write_atomic(&path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(path)
}

fn read_csv_block(path: &Path, axis: Axis) -> Result<Vec<f64>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut values = Vec::with_capacity(axis.len);
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        if no == 0 || line.trim().is_empty() {
            continue;
        }
        let row = parse_csv_row(&line, 2, no + 1)?;
        let expect = axis.point(values.len());
        if (row[0] - expect).abs() > 1e-9 * axis.step.abs().max(expect.abs()) {
            return Err(Error::Format(format!(
                "{}: line {}: X = {} does not match the manifest axis ({expect})",
                path.display(),
                no + 1,
                row[0]
            )));
        }
        values.push(row[1]);
    }
    Ok(values)
}

/// Reads a manifest and all of its blocks; block paths are resolved relative to the manifest.
pub fn load_tomograms(manifest_path: &Path) -> Result<(TomogramManifest, Vec<Tomogram>)> {
    let text = std::fs::read_to_string(manifest_path)?;
    let manifest: TomogramManifest = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", manifest_path.display())))?;
    if !(manifest.hbar > 0.0) {
        return Err(Error::Format(format!("manifest hbar must be positive (got {})", manifest.hbar)));
    }
    if manifest.blocks.is_empty() {
        return Err(Error::Format("manifest lists no blocks".into()));
    }
    let axis = Axis::new(manifest.x_axis.start, manifest.x_axis.step, manifest.x_axis.len)
        .map_err(|e| Error::Format(e.to_string()))?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut tomos = Vec::with_capacity(manifest.blocks.len());
    for block in &manifest.blocks {
        let path = dir.join(&block.file);
        let values = match manifest.format {
            BlockFormat::Csv => read_csv_block(&path, axis)?,
            BlockFormat::F64le => read_f64_block(&std::fs::read(&path)?)?,
        };
        if values.len() != axis.len {
            return Err(Error::Format(format!(
                "{}: {} values, manifest axis has {}",
                path.display(),
                values.len(),
                axis.len
            )));
        }
        let params = RotationParams::new(block.mu, block.nu).map_err(|e| Error::Format(e.to_string()))?;
        let t = Tomogram::new(params, axis, values, manifest.hbar, manifest.route)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        tomos.push(t.with_warning(block.warning));
    }
    Ok((manifest, tomos))
}
