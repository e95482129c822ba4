//! JSON state files.
//!
//! ```json
//! {
//!   "entries": [{"re": 0.5, "im": 0.0}, ... 16 entries, row-major ...],
//!   "provenance": {"source": "W", "params": {"f": 1.0}}
//! }
//! ```
//!
//! `provenance` is optional. Reading validates the matrix and reports the
//! structured rejection reason on failure.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat4, C64};
use crate::states::{DensityMatrix, Provenance};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct Entry {
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    entries: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

/// Parse the raw matrix without validating it.
pub fn matrix_from_json(text: &str) -> Result<(Mat4, Option<Provenance>)> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.entries.len() != 16 {
        return Err(Error::Parse(format!("expected 16 entries, found {}", file.entries.len())));
    }
    let m = Mat4::from_fn(|i, j| {
        let e = file.entries[4 * i + j];
        C64::new(e.re, e.im)
    });
    Ok((m, file.provenance))
}

pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let (m, prov) = matrix_from_json(text)?;
    Ok(DensityMatrix::new(m, prov.unwrap_or_else(Provenance::external))?)
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    let file = StateFile {
        entries: rho
            .matrix()
            .to_vec()
            .into_iter()
            .map(|z| Entry { re: z.re, im: z.im })
            .collect(),
        provenance: Some(rho.provenance().clone()),
    };
    serde_json::to_string_pretty(&file).expect("plain data serialises")
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    state_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_state(path: impl AsRef<Path>, rho: &DensityMatrix) -> Result<()> {
    std::fs::write(path, state_to_json(rho) + "\n")?;
    Ok(())
}
