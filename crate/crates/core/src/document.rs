//! Versioned JSON result documents.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::objective::ObjectiveBreakdown;
use crate::optimizer::FitResult;
use crate::permutation::PermutationVector;

pub const SCHEMA_VERSION: u32 = 1;

/// Identifies the data a result was computed on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataFingerprint {
    pub rows: usize,
    pub cols: usize,
    /// SHA-256 over the row-major little-endian `f64` bytes.
    pub sha256: String,
}

impl DataFingerprint {
    pub fn of(data: &DataMatrix) -> Self {
        let mut hasher = Sha256::new();
        hasher.update((data.rows() as u64).to_le_bytes());
        hasher.update((data.cols() as u64).to_le_bytes());
        for v in data.as_slice() {
            hasher.update(v.to_le_bytes());
        }
        Self {
            rows: data.rows(),
            cols: data.cols(),
            sha256: hex::encode(hasher.finalize()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub data_fingerprint: DataFingerprint,
    /// Echo of the configuration that produced the result.
    pub config: serde_json::Value,
    /// 1-based row indices in the learned order.
    pub sigma: PermutationVector,
    pub w: Vec<f64>,
    pub trace: Vec<f64>,
    pub breakdown: ObjectiveBreakdown,
    pub iterations: usize,
    pub converged: bool,
    pub restart_index: usize,
    /// Wall time in seconds per phase.
    pub timings: BTreeMap<String, f64>,
}

impl ResultDocument {
    pub fn new(data: &DataMatrix, config: &impl Serialize, fit: &FitResult) -> Result<Self> {
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            data_fingerprint: DataFingerprint::of(data),
            config: serde_json::to_value(config)?,
            sigma: fit.sigma.clone(),
            w: fit.w.as_slice().to_vec(),
            trace: fit.trace.clone(),
            breakdown: fit.breakdown.clone(),
            iterations: fit.iterations,
            converged: fit.converged,
            restart_index: fit.restart_index,
            timings: BTreeMap::new(),
        })
    }

    pub fn with_timing(mut self, phase: &str, seconds: f64) -> Self {
        self.timings.insert(phase.to_owned(), seconds);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value
            .get("schema_version")
            .and_then(serde_json::Value::as_u64)
        {
            Some(v) if v == u64::from(SCHEMA_VERSION) => {}
            Some(v) => {
                return Err(Error::Schema(format!(
                    "schema version {v} is not supported (expected {SCHEMA_VERSION})"
                )))
            }
            None => return Err(Error::Schema("missing schema_version".into())),
        }
        serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))
    }
}

/// A document loaded against a specific data matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedResult {
    pub document: ResultDocument,
    /// Set when the document was computed on different data.
    pub fingerprint_mismatch: bool,
}

pub fn save_result(doc: &ResultDocument, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, doc.to_json()?)?;
    Ok(())
}

pub fn load_result(path: impl AsRef<Path>) -> Result<ResultDocument> {
    ResultDocument::from_json(&std::fs::read_to_string(path)?)
}

/// Loads a document and checks it against `data`.
pub fn load_result_for(path: impl AsRef<Path>, data: &DataMatrix) -> Result<LoadedResult> {
    let document = load_result(path)?;
    let fingerprint_mismatch = document.data_fingerprint != DataFingerprint::of(data);
    Ok(LoadedResult {
        document,
        fingerprint_mismatch,
    })
}
