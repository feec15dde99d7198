use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{eigenvalues, Complex, Matrix};
use crate::error::{Error, Result};

/// Real polynomial with coefficients in ascending degree order.
///
/// Trailing zero coefficients are trimmed on construction, so the leading
/// coefficient is nonzero unless the polynomial is identically zero (stored
/// as an empty coefficient list).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `s`.
    pub fn s() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    /// Monic polynomial with the given roots.
    ///
    /// Complex roots are expanded in complex arithmetic; the imaginary parts
    /// of the coefficients are dropped, which is exact when the roots are
    /// conjugate-closed.
    pub fn from_roots(roots: &[Complex]) -> Self {
        let mut c = vec![Complex::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        Self::new(c.into_iter().map(|z| z.re).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Coefficient of `s^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    pub fn monic(&self) -> Result<Self> {
        let lead = self.leading();
        if lead == 0.0 {
            return Err(Error::Domain("cannot normalize the zero polynomial".into()));
        }
        if lead == 1.0 {
            return Ok(self.clone());
        }
        Ok(Self::new(self.coeffs.iter().map(|c| c / lead).collect()))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, s: Complex) -> Complex {
        self.coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect())
    }

    /// Euclidean division: returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or_else(|| Error::Domain("division by the zero polynomial".into()))?;
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![0.0; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (i, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= q * dc;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Largest absolute coefficient, used to scale tolerances.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Number of leading zero roots (lowest nonzero coefficient index).
    pub fn origin_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|&&c| c == 0.0).count()
    }
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("polynomial coefficient is not finite".into()));
        }
        Ok(Self::new(coeffs))
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ if a != 1.0 => write!(f, "{a}")?,
                _ => {}
            }
            match k {
                0 => {}
                1 => write!(f, "s")?,
                _ => write!(f, "s^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Top-row companion matrix of a monic polynomial.
///
/// For `p(s) = s^m + a_{m-1} s^{m-1} + ... + a_0` the first row is
/// `[-a_{m-1}, ..., -a_0]` and the subdiagonal holds ones.
pub fn companion(p: &Polynomial) -> Result<Matrix> {
    let m = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::Domain(format!("companion needs degree >= 1, got `{p}`"))),
    };
    if !p.is_monic() {
        return Err(Error::Domain(format!("companion needs a monic polynomial, got `{p}`")));
    }
    let mut a = Matrix::zeros(m, m);
    for j in 0..m {
        a[(0, j)] = -p.coeff(m - 1 - j);
    }
    for i in 1..m {
        a[(i, i - 1)] = 1.0;
    }
    Ok(a)
}

/// All roots with multiplicity, as eigenvalues of the companion matrix.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex>> {
    match p.degree() {
        None => Err(Error::Domain("the zero polynomial has no finite root set".into())),
        Some(0) => Ok(Vec::new()),
        Some(_) => eigenvalues(&companion(&p.monic()?)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::charpoly;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert!(Polynomial::new(vec![0.0]).is_zero());
    }

    #[test]
    fn monic_is_idempotent() {
        let p = Polynomial::new(vec![2.0, 4.0, 2.0]);
        let m = p.monic().unwrap();
        assert_eq!(m.coeffs(), &[1.0, 2.0, 1.0]);
        assert_eq!(m.monic().unwrap(), m);
        assert!(Polynomial::zero().monic().is_err());
    }

    #[test]
    fn long_division_recovers_factors() {
        let a = Polynomial::new(vec![1.0, 1.0]);
        let b = Polynomial::new(vec![2.0, 0.0, 1.0]);
        let prod = &a * &b;
        let (q, r) = prod.div_rem(&a).unwrap();
        assert!(close(q.coeffs(), b.coeffs(), 1e-14));
        assert!(r.is_zero());
    }

    #[test]
    fn roots_of_difference_of_squares() {
        let r = poly_roots(&Polynomial::new(vec![-1.0, 0.0, 1.0])).unwrap();
        assert!((r[0].re + 1.0).abs() < 1e-12 && (r[1].re - 1.0).abs() < 1e-12);
        assert_eq!(r[0].im, 0.0);
    }

    #[test]
    fn roots_of_unit_damped_quadratic() {
        let r = poly_roots(&Polynomial::new(vec![1.0, 1.0, 1.0])).unwrap();
        let h = 3f64.sqrt() / 2.0;
        assert!((r[0] - Complex::new(-0.5, -h)).norm() < 1e-12);
        assert!((r[1] - Complex::new(-0.5, h)).norm() < 1e-12);
    }

    #[test]
    fn roots_with_golden_ratio_zeros() {
        let r = poly_roots(&Polynomial::new(vec![-4.0, 2.0, 1.0])).unwrap();
        let s5 = 5f64.sqrt();
        assert!((r[0].re - (-1.0 - s5)).abs() < 1e-12);
        assert!((r[1].re - (-1.0 + s5)).abs() < 1e-12);
        assert!((r[0].re + 3.2361).abs() < 1e-4 && (r[1].re - 1.2361).abs() < 1e-4);
    }

    #[test]
    fn zero_polynomial_has_no_roots() {
        assert!(matches!(poly_roots(&Polynomial::zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn companion_first_order() {
        let a = companion(&Polynomial::new(vec![3.0, 1.0])).unwrap();
        assert_eq!(a, Matrix::from_element(1, 1, -3.0));
    }

    #[test]
    fn companion_of_oscillator() {
        let a = companion(&Polynomial::new(vec![1.0, 0.0, 1.0])).unwrap();
        assert_eq!(a, Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        assert!(close(charpoly(&a).unwrap().coeffs(), &[1.0, 0.0, 1.0], 1e-12));
    }

    #[test]
    fn companion_of_cubic() {
        let p = Polynomial::new(vec![0.0, 1.0, 0.0, 1.0]);
        let a = companion(&p).unwrap();
        assert_eq!(a.nrows(), 3);
        assert!(close(charpoly(&a).unwrap().coeffs(), p.coeffs(), 1e-10));
    }

    #[test]
    fn companion_rejects_non_monic() {
        assert!(matches!(companion(&Polynomial::new(vec![1.0, 2.0])), Err(Error::Domain(_))));
        assert!(companion(&Polynomial::constant(1.0)).is_err());
    }

    #[test]
    fn display_is_readable() {
        let p = Polynomial::new(vec![4.0, 0.0, -1.0, 1.0]);
        assert_eq!(p.to_string(), "s^3 - s^2 + 4");
    }
}
