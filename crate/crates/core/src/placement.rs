//! Single-input pole placement (Ackermann) and its observer dual.

use crate::error::{Error, Result};
use crate::numlin::{is_conjugate_closed, rank, solve_linear, Complex, Matrix, Polynomial};

/// Pair-matching tolerance for the conjugate-closure check on pole sets.
pub const CONJUGATE_TOLERANCE: f64 = 1e-9;

/// State-feedback gain `K` (1 x n) with `eig(F - G K)` equal to `desired`.
///
/// Ackermann's formula: `K = e_n^T C^-1 phi(F)` where `C` is the
/// controllability matrix and `phi` the desired characteristic polynomial.
pub fn place(f: &Matrix, g: &Matrix, desired: &[Complex]) -> Result<Matrix> {
    let n = f.nrows();
    if !f.is_square() || g.nrows() != n {
        return Err(Error::Dimension(format!(
            "place needs square F and G with matching rows, got {}x{} and {}x{}",
            f.nrows(),
            f.ncols(),
            g.nrows(),
            g.ncols()
        )));
    }
    if g.ncols() != 1 {
        return Err(Error::Dimension(format!("place supports single-input systems only, G has {} columns", g.ncols())));
    }
    if desired.len() != n {
        return Err(Error::Domain(format!("expected {n} desired poles, got {}", desired.len())));
    }
    if desired.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
        return Err(Error::Domain("desired poles must be finite".into()));
    }
    if !is_conjugate_closed(desired, CONJUGATE_TOLERANCE) {
        return Err(Error::Domain("desired poles are not closed under conjugation".into()));
    }
    if n == 0 {
        return Ok(Matrix::zeros(1, 0));
    }

    let mut ctrb = Matrix::zeros(n, n);
    let mut col = g.clone();
    for k in 0..n {
        ctrb.set_column(k, &col.column(0));
        col = f * col;
    }
    let r = rank(&ctrb);
    if r < n {
        return Err(Error::Uncontrollable { rank: r, order: n });
    }
    let mut e_n = Matrix::zeros(n, 1);
    e_n[(n - 1, 0)] = 1.0;
    let y = solve_linear(&ctrb.transpose(), &e_n).map_err(|e| match e {
        Error::Singular { .. } => Error::Uncontrollable { rank: r.min(n - 1), order: n },
        other => other,
    })?;
    let phi = Polynomial::from_roots(desired);
    Ok(y.transpose() * poly_of_matrix(&phi, f))
}

/// Estimator gain `L` (n x 1) with `eig(F - L H)` equal to `desired`,
/// obtained by placing the dual pair `(F^T, H^T)`.
pub fn place_estimator(f: &Matrix, h: &Matrix, desired: &[Complex]) -> Result<Matrix> {
    match place(&f.transpose(), &h.transpose(), desired) {
        Ok(k) => Ok(k.transpose()),
        Err(Error::Uncontrollable { rank, order }) => Err(Error::Unobservable { rank, order }),
        Err(e) => Err(e),
    }
}

/// `p(F)` by Horner's scheme.
fn poly_of_matrix(p: &Polynomial, f: &Matrix) -> Matrix {
    let n = f.nrows();
    p.coeffs().iter().rev().fold(Matrix::zeros(n, n), |acc, &c| &acc * f + Matrix::identity(n, n) * c)
}
