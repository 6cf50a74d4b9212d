use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Per-sample coordinates taken from selected eigenvectors.
#[derive(Clone, Debug)]
pub struct Embedding {
    coords: DMatrix<f64>,
    source_t: f64,
    indices: Vec<usize>,
}

impl Embedding {
    /// `indices` are 0-based eigenvector positions (0 is the trivial one).
    pub fn new(coords: DMatrix<f64>, source_t: f64, indices: Vec<usize>) -> Result<Self> {
        if coords.ncols() != indices.len() {
            return Err(Error::DimensionMismatch(coords.ncols(), indices.len()));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("embedding"));
        }
        Ok(Embedding {
            coords,
            source_t,
            indices,
        })
    }

    /// n × ℓ matrix, one row per sample.
    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn source_t(&self) -> f64 {
        self.source_t
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.coords.column(c).iter().copied().collect()
    }
}
