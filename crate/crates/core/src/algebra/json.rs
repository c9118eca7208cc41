use serde::{Deserialize, Serialize};

use super::{AlgebraTag, DenseMatrix, HermitianPD};
use crate::{Error, Result};

/// Matrix interchange record:
/// `{"beta": int, "m": int, "n": int, "entries": m×n×β nested reals}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default = "default_format_version")]
    pub format_version: u32,
    pub beta: u32,
    pub m: usize,
    pub n: usize,
    pub entries: Vec<Vec<Vec<f64>>>,
}

fn default_format_version() -> u32 {
    crate::FORMAT_VERSION
}

impl MatrixJson {
    pub fn from_matrix(a: &DenseMatrix) -> Self {
        Self {
            format_version: crate::FORMAT_VERSION,
            beta: a.tag().beta() as u32,
            m: a.rows(),
            n: a.cols(),
            entries: a.to_nested(),
        }
    }

    pub fn from_hermitian(h: &HermitianPD) -> Self {
        Self::from_matrix(&h.to_dense())
    }

    pub fn to_matrix(&self) -> Result<DenseMatrix> {
        let tag = AlgebraTag::from_beta(self.beta)?;
        if self.entries.len() != self.m {
            return Err(Error::Dimension(format!(
                "\"entries\" has {} rows, header says m = {}",
                self.entries.len(),
                self.m
            )));
        }
        let mut flat: Vec<&[f64]> = Vec::with_capacity(self.m * self.n);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.n {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, header says n = {}",
                    row.len(),
                    self.n
                )));
            }
            flat.extend(row.iter().map(|e| e.as_slice()));
        }
        DenseMatrix::from_coeffs(tag, self.m, self.n, &flat)
    }
}
