//! Small dense numerical kernel: eigenvalues, polynomial roots and linear
//! solves for the n <= 16 systems handled by the design routines.

mod eigen;
mod poly;
mod solve;
mod spectrum;

pub use eigen::{charpoly, eigenvalues};
pub use poly::{companion, poly_roots, Polynomial};
pub use solve::{rank, singular_values, solve_linear, RANK_TOLERANCE};
pub use spectrum::{is_conjugate_closed, sort_spectrum, spectrum_distance, symmetrize_conjugates};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

/// Real dense matrix.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Complex dense matrix, used for frequency responses.
pub type CMatrix = nalgebra::DMatrix<Complex>;

/// Builds a matrix from row-major nested rows.
///
/// `cols` is only consulted when `rows` is empty or every row is empty, so
/// that `0 x m` and `n x 0` shapes survive a JSON round trip.
pub fn matrix_from_rows(rows: &[Vec<f64>], cols: usize) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = match rows.first() {
        Some(r) if !r.is_empty() => r.len(),
        _ => cols,
    };
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != rows[0].len()) {
        return Err(Error::Dimension(format!("row {i} has {} entries, expected {}", r.len(), rows[0].len())));
    }
    let m = Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    ensure_finite(&m)?;
    Ok(m)
}

/// Row-major nested rows of `m`.
pub fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn ensure_finite(m: &Matrix) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Invalid("matrix contains non-finite entries".into()))
    }
}

/// Promotes a real matrix to complex.
pub fn complexify(m: &Matrix) -> CMatrix {
    m.map(|v| Complex::new(v, 0.0))
}

/// Row vector `1 x n` from a slice.
pub fn row(values: &[f64]) -> Matrix {
    Matrix::from_row_slice(1, values.len(), values)
}

/// Column vector `n x 1` from a slice.
pub fn column(values: &[f64]) -> Matrix {
    Matrix::from_column_slice(values.len(), 1, values)
}

/// `ln |det m|` from the pivots of an LU factorization; `-inf` when singular.
pub fn ln_abs_det(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let lu = m.clone().lu();
    lu.u().diagonal().iter().map(|p| p.norm().ln()).sum()
}

/// Determinant of a small complex matrix.
pub fn det(m: &CMatrix) -> Complex {
    if m.nrows() == 0 {
        return Complex::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}
