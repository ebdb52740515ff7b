//! File helpers shared by the serializers: atomic writes and the CSV number format.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits so that parsing it back yields the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to `path` through a temporary file in the same directory followed by a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Little-endian float64 block.
pub fn f64_block(values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 8);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_f64_block(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() % 8 != 0 {
        return Err(Error::Format(format!(
            "binary block length {} is not a multiple of 8",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

/// Parses one CSV line of floats, skipping nothing; used by the readers for our own files.
pub(crate) fn parse_csv_row(line: &str, expected: usize, line_no: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != expected {
        return Err(Error::Format(format!(
            "line {line_no}: expected {expected} columns, found {}",
            fields.len()
        )));
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .map_err(|e| Error::Format(format!("line {line_no}: {e}")))
        })
        .collect()
}
