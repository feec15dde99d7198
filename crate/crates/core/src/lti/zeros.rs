use std::f64::consts::PI;

use super::StateSpace;
use crate::error::{Error, Result};
use crate::numlin::{
    complexify, det, eigenvalues, singular_values, sort_spectrum, symmetrize_conjugates, CMatrix, Complex,
};

/// Zeros farther than this (relative to the system scale) are treated as
/// infinite.
const INFINITE_ZERO: f64 = 1e8;
const DEGREE_TOLERANCE: f64 = 1e-10;
const SHIFTS: [f64; 6] =
    [0.6180339887, -1.3247179572, 2.2360679775, -0.4142135624, std::f64::consts::PI, -std::f64::consts::E];

/// Finite transmission zeros of a square system.
///
/// The Rosenbrock pencil `P(s) = [[sI - F, -G], [H, J]]` equals
/// `P(s0) + (s - s0) E` with `E = diag(I_n, 0)`. With `X` the leading
/// `n x n` block of `P(s0)^-1`, every nonzero eigenvalue `mu` of `X` gives a
/// finite zero `s0 - 1/mu`; zero eigenvalues belong to infinite zeros. The
/// number of finite zeros is the degree of `det P(s)`, read off an
/// interpolation of the determinant on a circle.
pub fn transmission_zeros(sys: &StateSpace) -> Result<Vec<Complex>> {
    let (n, m) = (sys.order(), sys.outputs());
    if sys.inputs() != m {
        return Err(Error::Dimension(format!(
            "transmission zeros need a square system, got {m} outputs and {} inputs",
            sys.inputs()
        )));
    }
    if n == 0 {
        return if m == 0 || sys.j.determinant().abs() > 0.0 { Ok(Vec::new()) } else { Err(Error::DegenerateSystem) };
    }
    let scale = [&sys.f, &sys.g, &sys.h, &sys.j].iter().map(|a| a.amax()).fold(1.0f64, f64::max) * (n as f64).sqrt();

    let pencil = |s: Complex| -> CMatrix {
        let mut p = CMatrix::zeros(n + m, n + m);
        p.view_mut((0, 0), (n, n)).copy_from(&(CMatrix::identity(n, n) * s - complexify(&sys.f)));
        p.view_mut((0, n), (n, m)).copy_from(&complexify(&(-&sys.g)));
        p.view_mut((n, 0), (m, n)).copy_from(&complexify(&sys.h));
        p.view_mut((n, n), (m, m)).copy_from(&complexify(&sys.j));
        p
    };

    let count = finite_zero_count(&pencil, n, scale)?;
    if count == 0 {
        return Ok(Vec::new());
    }

    for &shift in &SHIFTS {
        let s0 = shift * scale;
        let p0 = pencil(Complex::new(s0, 0.0)).map(|z| z.re);
        let sv = singular_values(&p0);
        if sv[sv.len() - 1] <= 1e-8 * sv[0] {
            continue;
        }
        let Some(inv) = p0.try_inverse() else { continue };
        let x = inv.view((0, 0), (n, n)).into_owned();
        let mut mu = eigenvalues(&x)?;
        mu.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        let mut zeros: Vec<Complex> = mu
            .iter()
            .take(count)
            .filter(|u| u.norm() > 0.0)
            .map(|u| Complex::new(s0, 0.0) - u.inv())
            .filter(|z| z.norm() < INFINITE_ZERO * scale)
            .collect();
        symmetrize_conjugates(&mut zeros);
        sort_spectrum(&mut zeros);
        return Ok(zeros);
    }
    Err(Error::Numerical("no regular shift found for the system pencil".into()))
}

/// Degree of `det P(s)` from its values at `n + 1` points on a circle.
fn finite_zero_count(pencil: &dyn Fn(Complex) -> CMatrix, n: usize, radius: f64) -> Result<usize> {
    let k = n + 1;
    let center = Complex::new(0.1 * radius, 0.0);
    let values: Vec<Complex> = (0..k)
        .map(|i| {
            let t = Complex::from_polar(1.0, 2.0 * PI * i as f64 / k as f64);
            det(&pencil(center + t * radius))
        })
        .collect();
    // Hadamard-style bound on the determinant magnitude over the circle.
    let bound = {
        let p = pencil(center + Complex::new(radius, 0.0));
        (0..p.ncols()).map(|j| p.column(j).norm().max(f64::MIN_POSITIVE)).product::<f64>()
    };
    let coeffs: Vec<f64> = (0..k)
        .map(|j| {
            let sum: Complex = values
                .iter()
                .enumerate()
                .map(|(i, v)| v * Complex::from_polar(1.0, -2.0 * PI * (i * j) as f64 / k as f64))
                .sum();
            sum.norm() / k as f64
        })
        .collect();
    let top = coeffs.iter().copied().fold(0.0, f64::max);
    if top <= 1e-12 * bound {
        return Err(Error::DegenerateSystem);
    }
    Ok(coeffs.iter().rposition(|&c| c > DEGREE_TOLERANCE * top).unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::RationalSiso;
    use crate::numlin::{Matrix, Polynomial};

    fn example_three() -> StateSpace {
        StateSpace::strictly_proper(
            Matrix::from_row_slice(
                4,
                4,
                &[-1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -2.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            ),
            Matrix::from_row_slice(4, 2, &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 2.0, 4.0]),
            Matrix::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        )
        .unwrap()
    }

    #[test]
    fn coupled_two_channel_zeros() {
        let z = transmission_zeros(&example_three()).unwrap();
        assert_eq!(z.len(), 2);
        assert!((z[0].re + 3.2361).abs() < 1e-3 && (z[1].re - 1.2361).abs() < 1e-3);
        assert!(z.iter().all(|v| v.im == 0.0));
    }

    #[test]
    fn diagonal_two_channel_system_has_no_zeros() {
        let sys = StateSpace::strictly_proper(
            Matrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]),
            Matrix::from_row_slice(2, 2, &[7.0, -8.0, -12.0, 14.0]),
            Matrix::from_row_slice(2, 2, &[7.0, 8.0, 6.0, 7.0]),
        )
        .unwrap();
        assert!(transmission_zeros(&sys).unwrap().is_empty());
    }

    #[test]
    fn siso_zeros_are_numerator_roots() {
        let tf = RationalSiso::new(Polynomial::new(vec![1.0, 1.0]), Polynomial::new(vec![0.0, 0.0, 1.0])).unwrap();
        let z = transmission_zeros(&tf.to_state_space().unwrap()).unwrap();
        assert_eq!(z.len(), 1);
        assert!((z[0].re + 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_feedthrough_static_gain_is_degenerate() {
        let sys = StateSpace::new(Matrix::zeros(0, 0), Matrix::zeros(0, 1), Matrix::zeros(1, 0), Matrix::zeros(1, 1))
            .unwrap();
        assert!(matches!(transmission_zeros(&sys), Err(Error::DegenerateSystem)));
    }

    #[test]
    fn disconnected_channel_is_degenerate() {
        let sys = StateSpace::strictly_proper(
            Matrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]),
            Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
            Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]),
        )
        .unwrap();
        assert!(matches!(transmission_zeros(&sys), Err(Error::DegenerateSystem)));
    }
}
