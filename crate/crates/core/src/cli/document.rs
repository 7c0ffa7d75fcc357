//! JSON system specification files.
//!
//! Complex entries are `[re, im]` pairs; matrices are row-major nested arrays.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "ground_indices": [0],
//!   "hamiltonian": [[[0, 0], [0.05, 0]], [[0.05, 0], [1, 0]]],
//!   "jumps": [{ "label": "gamma", "matrix": [[[0, 0], [0.447, 0]], [[0, 0], [0, 0]]] }],
//!   "metadata": { "preset": "two-level" }
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::system::{FieldDrive, Jump, SystemSpec};

pub type MatrixDocument = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpDocument {
    pub label: String,
    pub matrix: MatrixDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDocument {
    pub label: String,
    pub v_plus: MatrixDocument,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub dimension: usize,
    pub ground_indices: Vec<usize>,
    pub hamiltonian: MatrixDocument,
    #[serde(default)]
    pub jumps: Vec<JumpDocument>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub metadata: Map<String, Value>,
}

pub fn matrix_to_document(m: &ComplexMatrix) -> MatrixDocument {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn matrix_from_document(doc: &MatrixDocument, dim: usize, field: &str) -> Result<ComplexMatrix> {
    if doc.len() != dim {
        return Err(Error::Parse(format!("{field}: expected {dim} rows, found {}", doc.len())));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for (i, row) in doc.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Parse(format!(
                "{field}: row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
        entries.extend(row.iter().map(|[re, im]| C64::new(*re, *im)));
    }
    ComplexMatrix::new(dim, entries).map_err(|e| Error::Parse(format!("{field}: {e}")))
}

impl SpecDocument {
    pub fn from_spec(spec: &SystemSpec, metadata: Map<String, Value>) -> Self {
        Self {
            dimension: spec.dim,
            ground_indices: spec.ground.clone(),
            hamiltonian: matrix_to_document(&spec.hamiltonian),
            jumps: spec
                .jumps
                .iter()
                .map(|j| JumpDocument {
                    label: j.label.clone(),
                    matrix: matrix_to_document(&j.op),
                })
                .collect(),
            fields: spec
                .fields
                .iter()
                .map(|f| FieldDocument {
                    label: f.label.clone(),
                    v_plus: matrix_to_document(&f.v_plus),
                    omega: f.omega,
                })
                .collect(),
            basis_labels: spec.basis_labels.clone(),
            metadata,
        }
    }

    /// Parses a document; errors carry the line, column and field involved.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    /// Builds the system without validating it.
    pub fn to_spec(&self) -> Result<SystemSpec> {
        let dim = self.dimension;
        if dim == 0 {
            return Err(Error::Parse("dimension: must be at least 1".into()));
        }
        let h = matrix_from_document(&self.hamiltonian, dim, "hamiltonian")?;
        let jumps = self
            .jumps
            .iter()
            .map(|j| Ok(Jump::new(j.label.clone(), matrix_from_document(&j.matrix, dim, &format!("jumps[{}].matrix", j.label))?)))
            .collect::<Result<Vec<_>>>()?;
        let fields = self
            .fields
            .iter()
            .map(|f| {
                let v = matrix_from_document(&f.v_plus, dim, &format!("fields[{}].v_plus", f.label))?;
                if !f.omega.is_finite() {
                    return Err(Error::Parse(format!("fields[{}].omega: not finite", f.label)));
                }
                Ok(FieldDrive::new(f.label.clone(), v, f.omega))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut spec = SystemSpec::new(h, self.ground_indices.iter().copied(), jumps).with_fields(fields);
        if let Some(labels) = &self.basis_labels {
            if labels.len() != dim {
                return Err(Error::Parse(format!(
                    "basis_labels: expected {dim} labels, found {}",
                    labels.len()
                )));
            }
            spec = spec.with_basis_labels(labels.iter().cloned());
        }
        Ok(spec)
    }
}
