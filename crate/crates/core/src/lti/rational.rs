use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::StateSpace;
use crate::error::{Error, Result};
use crate::numlin::{poly_roots, Complex, Matrix, Polynomial};

/// Distance under which a numerator and denominator root are treated as a
/// common factor.
pub const CANCEL_TOLERANCE: f64 = 1e-8;

/// Scalar transfer function `num(s) / den(s)` with common factors removed.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSiso {
    num: Polynomial,
    den: Polynomial,
}

impl RationalSiso {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("transfer function denominator is zero".into()));
        }
        let (num, den) = cancel_common_factors(num, den)?;
        let lead = den.leading();
        Ok(Self { num: num.scale(1.0 / lead), den: den.scale(1.0 / lead) })
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    /// Monic denominator.
    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn order(&self) -> usize {
        self.den.degree().unwrap_or(0)
    }

    /// `deg den - deg num`; negative for improper functions. A zero
    /// numerator reports `None`.
    pub fn relative_degree(&self) -> Option<isize> {
        Some(self.den.degree()? as isize - self.num.degree()? as isize)
    }

    pub fn poles(&self) -> Result<Vec<Complex>> {
        poly_roots(&self.den)
    }

    pub fn zeros(&self) -> Result<Vec<Complex>> {
        if self.num.is_zero() {
            return Ok(Vec::new());
        }
        poly_roots(&self.num)
    }

    pub fn eval(&self, s: Complex) -> Result<Complex> {
        let poles = self.poles()?;
        if let Some(d) = poles.iter().map(|p| (p - s).norm()).reduce(f64::min) {
            if d < super::POLE_TOLERANCE {
                return Err(Error::PoleProximity { omega: s.im, distance: d });
            }
        }
        Ok(self.num.eval_complex(s) / self.den.eval_complex(s))
    }

    /// Controllable-canonical realization; requires a proper function.
    pub fn to_state_space(&self) -> Result<StateSpace> {
        let n = self.order();
        let dn = self.num.degree().unwrap_or(0);
        if !self.num.is_zero() && dn > n {
            return Err(Error::Domain(format!(
                "improper transfer function (numerator degree {dn} > denominator degree {n})"
            )));
        }
        // num = q den + r with q constant for a proper function.
        let (q, r) = self.num.div_rem(&self.den)?;
        let jv = q.coeff(0);
        let mut f = Matrix::zeros(n, n);
        for j in 0..n {
            f[(0, j)] = -self.den.coeff(n - 1 - j);
        }
        for i in 1..n {
            f[(i, i - 1)] = 1.0;
        }
        let mut g = Matrix::zeros(n, 1);
        if n > 0 {
            g[(0, 0)] = 1.0;
        }
        let h = Matrix::from_fn(1, n, |_, j| r.coeff(n - 1 - j));
        StateSpace::new(f, g, h, Matrix::from_element(1, 1, jv))
    }
}

/// Removes numerator roots that are also denominator roots.
///
/// A numerator root `r` cancels when a denominator root lies within
/// [`CANCEL_TOLERANCE`] (scaled by `max(1, |r|)`) or when `den(r)` vanishes
/// to rounding, which also catches repeated denominator roots that the
/// root finder splits.
fn cancel_common_factors(mut num: Polynomial, mut den: Polynomial) -> Result<(Polynomial, Polynomial)> {
    loop {
        if num.degree().unwrap_or(0) == 0 || den.degree().unwrap_or(0) == 0 {
            return Ok((num, den));
        }
        let nr = poly_roots(&num)?;
        let dr = poly_roots(&den)?;
        let hit = nr.iter().copied().filter(|r| r.im >= 0.0).find(|&r| {
            let near = dr.iter().any(|d| (d - r).norm() <= CANCEL_TOLERANCE * r.norm().max(1.0));
            let scale: f64 = den.coeffs().iter().enumerate().map(|(k, c)| c.abs() * r.norm().powi(k as i32)).sum();
            near || den.eval_complex(r).norm() <= 64.0 * f64::EPSILON * scale
        });
        let Some(r) = hit else {
            return Ok((num, den));
        };
        let factor = if r.im.abs() <= CANCEL_TOLERANCE * r.norm().max(1.0) {
            Polynomial::new(vec![-r.re, 1.0])
        } else {
            Polynomial::new(vec![r.norm_sqr(), -2.0 * r.re, 1.0])
        };
        num = num.div_rem(&factor)?.0;
        den = den.div_rem(&factor)?.0;
    }
}

#[derive(Serialize, Deserialize)]
struct RationalJson {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl Serialize for RationalSiso {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RationalJson { num: self.num.coeffs().to_vec(), den: self.den.coeffs().to_vec() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalSiso {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RationalJson::deserialize(deserializer)?;
        let num = Polynomial::try_from(raw.num).map_err(serde::de::Error::custom)?;
        let den = Polynomial::try_from(raw.den).map_err(serde::de::Error::custom)?;
        RationalSiso::new(num, den).map_err(serde::de::Error::custom)
    }
}
