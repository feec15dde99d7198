use super::Matrix;
use crate::error::{Error, Result};

/// Relative singular-value threshold below which a matrix is treated as
/// rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

pub fn singular_values(a: &Matrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Numerical rank with the relative threshold [`RANK_TOLERANCE`].
pub fn rank(a: &Matrix) -> usize {
    let s = singular_values(a);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&v| v > RANK_TOLERANCE * smax).count(),
        _ => 0,
    }
}

/// Least-squares solution of `a x = b`, exact when `a` is square and well
/// conditioned.
///
/// `a` must have at least as many rows as columns and full column rank;
/// a rank-deficient `a` yields [`Error::Singular`] with the ratio
/// `sigma_max / sigma_min` as condition estimate.
pub fn solve_linear(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.nrows() != b.nrows() {
        return Err(Error::Dimension(format!("right-hand side has {} rows, matrix has {}", b.nrows(), a.nrows())));
    }
    if a.nrows() < a.ncols() {
        return Err(Error::Dimension(format!("underdetermined system ({}x{})", a.nrows(), a.ncols())));
    }
    super::ensure_finite(a)?;
    super::ensure_finite(b)?;
    if a.ncols() == 0 {
        return Ok(Matrix::zeros(0, b.ncols()));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin / smax < RANK_TOLERANCE {
        let condition = if smin == 0.0 { f64::INFINITY } else { smax / smin };
        return Err(Error::Singular { condition });
    }
    svd.solve(b, 0.0).map_err(|e| Error::Numerical(format!("SVD back-substitution failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_system() {
        let b = Matrix::from_column_slice(3, 1, &[1.0, -2.0, 3.5]);
        let x = solve_linear(&Matrix::identity(3, 3), &b).unwrap();
        assert!((x - b).norm() < 1e-15);
    }

    #[test]
    fn diagonal_system() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let b = Matrix::from_column_slice(2, 1, &[2.0, 8.0]);
        let x = solve_linear(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn recovers_planted_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = Matrix::from_fn(6, 6, |i, j| rng.gen_range(-1.0..1.0) + if i == j { 4.0 } else { 0.0 });
        let x0 = Matrix::from_fn(6, 1, |_, _| rng.gen_range(-5.0..5.0));
        let x = solve_linear(&a, &(&a * &x0)).unwrap();
        assert!((x - x0).amax() < 1e-10);
    }

    #[test]
    fn least_squares_for_tall_system() {
        let a = Matrix::from_row_slice(3, 1, &[1.0, 1.0, 1.0]);
        let b = Matrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let x = solve_linear(&a, &b).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_reports_condition() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        match solve_linear(&a, &Matrix::zeros(2, 1)) {
            Err(Error::Singular { condition }) => assert!(condition > 1e12),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn rank_counts_independent_columns() {
        let a = Matrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0]);
        assert_eq!(rank(&a), 2);
        assert_eq!(rank(&Matrix::zeros(2, 2)), 0);
    }
}
