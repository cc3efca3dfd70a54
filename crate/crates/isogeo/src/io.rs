//! JSON interchange for matrices, curves, and schedules.
//!
//! Matrices travel as `{"rows": n, "cols": k, "data": [[re, im], ...]}`
//! with the entries listed row by row; curves and schedules pair a time
//! grid with a list of such matrix objects. All numbers are IEEE-754
//! doubles, so a round trip through a file preserves values exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

/// Serialized form of a complex matrix: explicit shape plus a row-major
/// list of (real, imaginary) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::ShapeMismatch {
                expected_rows: self.rows,
                expected_cols: self.cols,
                rows: self.data.len(),
                cols: 1,
            });
        }
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for (flat, entry) in self.data.iter().enumerate() {
            let (i, j) = (flat / self.cols, flat % self.cols);
            m[(i, j)] = c(entry[0], entry[1]);
        }
        Ok(m)
    }
}

/// Serialized form of a sampled curve or operator schedule: a time grid
/// together with one matrix object per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveJson {
    pub times: Vec<f64>,
    pub matrices: Vec<MatrixJson>,
}

impl CurveJson {
    pub fn from_samples(times: &[f64], samples: &[CMatrix]) -> Self {
        Self {
            times: times.to_vec(),
            matrices: samples.iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_samples(&self) -> Result<(Vec<f64>, Vec<CMatrix>)> {
        if self.times.len() != self.matrices.len() {
            return Err(Error::GridMismatch {
                deviation: self.times.len().abs_diff(self.matrices.len()) as f64,
            });
        }
        let samples = self
            .matrices
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        Ok((self.times.clone(), samples))
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|_| Error::FileNotFound {
        path: path.display().to_string(),
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::ParseError {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// Reads a matrix object from a JSON file.
pub fn load_matrix(path: &Path) -> Result<CMatrix> {
    let text = read_text(path)?;
    let parsed: MatrixJson = parse(path, &text)?;
    parsed.to_matrix()
}

/// Writes a matrix object to a JSON file.
pub fn save_matrix(path: &Path, m: &CMatrix) -> Result<()> {
    let text = serde_json::to_string_pretty(&MatrixJson::from_matrix(m)).expect("serializable");
    std::fs::write(path, text).map_err(|_| Error::FileNotFound {
        path: path.display().to_string(),
    })
}

/// Reads a curve or schedule object from a JSON file.
pub fn load_curve(path: &Path) -> Result<(Vec<f64>, Vec<CMatrix>)> {
    let text = read_text(path)?;
    let parsed: CurveJson = parse(path, &text)?;
    parsed.to_samples()
}

/// Writes a curve or schedule object to a JSON file.
pub fn save_curve(path: &Path, times: &[f64], samples: &[CMatrix]) -> Result<()> {
    let text = serde_json::to_string_pretty(&CurveJson::from_samples(times, samples))
        .expect("serializable");
    std::fs::write(path, text).map_err(|_| Error::FileNotFound {
        path: path.display().to_string(),
    })
}
