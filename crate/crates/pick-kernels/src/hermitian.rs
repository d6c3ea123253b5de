//! Dense complex Hermitian matrices.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// A dense Hermitian matrix. Construction symmetrizes, so
/// `entries[i][j] == conj(entries[j][i])` holds exactly as stored and the
/// diagonal is exactly real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Wraps a square matrix, replacing it by its Hermitian part `(M + M*)/2`.
    pub fn new(mut data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        let n = data.nrows();
        for i in 0..n {
            for j in i..n {
                let h = (data[(i, j)] + data[(j, i)].conj()) * 0.5;
                data[(i, j)] = h;
                data[(j, i)] = h.conj();
            }
        }
        Ok(HermitianMatrix { data })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(dim: usize, f: F) -> Result<Self> {
        HermitianMatrix::new(DMatrix::from_fn(dim, dim, f))
    }

    /// Row-major real entries; handy in tests and fixtures.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        HermitianMatrix::from_fn(n, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        HermitianMatrix::new(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        HermitianMatrix::new(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    /// Diagonal entry as the real number it is.
    pub fn diag(&self, i: usize) -> f64 {
        self.data[(i, i)].re
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// Spectral scale used by the relative tolerance policy:
    /// `max(1, max_i |A_ii|)`.
    pub fn scale(&self) -> f64 {
        let mut s = 1.0f64;
        for i in 0..self.dim() {
            s = s.max(self.data[(i, i)].re.abs());
        }
        s
    }

    /// Real trace.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.data[(i, i)].re).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    /// Index of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if !self.data[(i, j)].is_finite() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let mut m = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                m = m.max((self.data[(i, j)] - other.data[(i, j)]).norm());
            }
        }
        Ok(m)
    }
}

/// Entrywise (Hadamard) product of two Hermitian matrices of equal dimension.
pub fn schur_product(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    HermitianMatrix::from_fn(a.dim(), |i, j| a.get(i, j) * b.get(i, j))
}
