//! Exogenous signal generators described by an annihilating polynomial.

use crate::error::{Error, Result};
use crate::numlin::{charpoly, companion, Matrix, Polynomial};

/// Generator of the reference/disturbance class annihilated by `d(p)`.
///
/// `(a, b, c)` is the top-row companion realization of `1 / d(s)`: its
/// impulse response `c e^{a t} b` is a member of the class, e.g. `sin t`
/// for `d = s^2 + 1` and the unit step for `d = s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalModel {
    pub d: Polynomial,
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

impl SignalModel {
    pub fn new(d: Polynomial) -> Result<Self> {
        let (a, b) = build_error_chain(&d)?;
        let m = a.nrows();
        let mut c = Matrix::zeros(1, m);
        c[(0, m - 1)] = 1.0;
        Ok(Self { d: d.monic()?, a, b, c })
    }

    /// Constants: `d = s`.
    pub fn step() -> Self {
        Self::new(Polynomial::s()).expect("degree one")
    }

    /// Sinusoids of frequency `omega`: `d = s^2 + omega^2`.
    pub fn sine(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!("sine frequency must be positive, got {omega}")));
        }
        Self::new(Polynomial::new(vec![omega * omega, 0.0, 1.0]))
    }

    /// General generator; `d` is taken as the characteristic polynomial of `a`.
    pub fn from_matrices(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        let m = a.nrows();
        if !a.is_square() || m == 0 || b.shape() != (m, 1) || c.shape() != (1, m) {
            return Err(Error::Dimension(format!(
                "generator needs a (m x m), b (m x 1), c (1 x m) with m >= 1, got a {:?}, b {:?}, c {:?}",
                a.shape(),
                b.shape(),
                c.shape()
            )));
        }
        let d = charpoly(&a)?;
        Ok(Self { d, a, b, c })
    }

    pub fn degree(&self) -> usize {
        self.a.nrows()
    }
}

/// Control-canonical chain `(A, B)` with characteristic polynomial `d`.
///
/// `A` is the top-row companion matrix of `d` and `B = e_1`, so the last
/// state sees `1 / d(s)` and the earlier states are its successive
/// derivatives.
pub fn build_error_chain(d: &Polynomial) -> Result<(Matrix, Matrix)> {
    match d.degree() {
        Some(m) if m >= 1 => {
            let a = companion(&d.monic()?)?;
            let mut b = Matrix::zeros(m, 1);
            b[(0, 0)] = 1.0;
            Ok((a, b))
        }
        _ => Err(Error::Domain(format!("signal model needs degree >= 1, got `{d}`"))),
    }
}
