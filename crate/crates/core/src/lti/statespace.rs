use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::RationalSiso;
use crate::error::{Error, Result};
use crate::numlin::{
    charpoly, complexify, eigenvalues, matrix_from_rows, matrix_rows, CMatrix, Complex, Matrix, Polynomial,
};

/// Continuous-time realization `x' = F x + G u + Gw w`, `y = H x + J u`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub f: Matrix,
    pub g: Matrix,
    pub h: Matrix,
    pub j: Matrix,
    gw: Option<Matrix>,
}

impl StateSpace {
    pub fn new(f: Matrix, g: Matrix, h: Matrix, j: Matrix) -> Result<Self> {
        let sys = Self { f, g, h, j, gw: None };
        sys.validate()?;
        Ok(sys)
    }

    /// Strictly proper realization with `J = 0`.
    pub fn strictly_proper(f: Matrix, g: Matrix, h: Matrix) -> Result<Self> {
        let j = Matrix::zeros(h.nrows(), g.ncols());
        Self::new(f, g, h, j)
    }

    /// Attaches a separate disturbance input matrix.
    pub fn with_gw(mut self, gw: Matrix) -> Result<Self> {
        if gw.nrows() != self.order() {
            return Err(Error::Dimension(format!("gw has {} rows, plant order is {}", gw.nrows(), self.order())));
        }
        self.gw = Some(gw);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let n = self.f.nrows();
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Dimension(what.to_string()))
            }
        };
        check(self.f.is_square(), "f must be square")?;
        check(self.g.nrows() == n, "g must have as many rows as f")?;
        check(self.h.ncols() == n, "h must have as many columns as f")?;
        check(self.j.nrows() == self.h.nrows() && self.j.ncols() == self.g.ncols(), "j must be (outputs x inputs)")?;
        for m in [&self.f, &self.g, &self.h, &self.j] {
            crate::numlin::ensure_finite(m)?;
        }
        if let Some(gw) = &self.gw {
            check(gw.nrows() == n, "gw must have as many rows as f")?;
            crate::numlin::ensure_finite(gw)?;
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.f.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.g.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.h.nrows()
    }

    pub fn is_siso(&self) -> bool {
        self.inputs() == 1 && self.outputs() == 1
    }

    /// Disturbance input matrix; defaults to `G` (input disturbance).
    pub fn gw(&self) -> &Matrix {
        self.gw.as_ref().unwrap_or(&self.g)
    }

    pub fn has_explicit_gw(&self) -> bool {
        self.gw.is_some()
    }

    pub fn poles(&self) -> Result<Vec<Complex>> {
        eigenvalues(&self.f)
    }

    /// Transfer matrix `H (sI - F)^-1 G + J` at a complex frequency.
    pub fn eval(&self, s: Complex) -> Result<CMatrix> {
        let n = self.order();
        let j = complexify(&self.j);
        if n == 0 {
            return Ok(j);
        }
        let poles = self.poles()?;
        if let Some(d) = poles.iter().map(|p| (p - s).norm()).reduce(f64::min) {
            if d < super::POLE_TOLERANCE {
                return Err(Error::PoleProximity { omega: s.im, distance: d });
            }
        }
        let a = CMatrix::identity(n, n) * s - complexify(&self.f);
        let x = a.lu().solve(&complexify(&self.g)).ok_or(Error::PoleProximity { omega: s.im, distance: 0.0 })?;
        Ok(complexify(&self.h) * x + j)
    }

    /// Similarity transform `x = T z`.
    pub fn transform(&self, t: &Matrix) -> Result<Self> {
        let tinv = t.clone().try_inverse().ok_or(Error::Singular { condition: f64::INFINITY })?;
        let mut out = Self::new(&tinv * &self.f * t, &tinv * &self.g, &self.h * t, self.j.clone())?;
        if let Some(gw) = &self.gw {
            out.gw = Some(&tinv * gw);
        }
        Ok(out)
    }

    /// Same realization with `f[(i, j)]` replaced; used to model parameter
    /// perturbations.
    pub fn with_f_entry(&self, i: usize, j: usize, value: f64) -> Result<Self> {
        let n = self.order();
        if i >= n || j >= n {
            return Err(Error::Dimension(format!("f has no entry ({i}, {j}) for order {n}")));
        }
        if !value.is_finite() {
            return Err(Error::Invalid("perturbed entry is not finite".into()));
        }
        let mut out = self.clone();
        out.f[(i, j)] = value;
        Ok(out)
    }

    /// Transfer function of a SISO realization.
    ///
    /// Uses the determinant identity
    /// `det(sI - F + G H) = det(sI - F) (1 + H (sI - F)^-1 G)`, so the
    /// numerator is `charpoly(F - G H) - charpoly(F) + J charpoly(F)`.
    pub fn to_rational(&self) -> Result<RationalSiso> {
        if !self.is_siso() {
            return Err(Error::Dimension(format!(
                "transfer function needs a SISO system, got {}x{}",
                self.outputs(),
                self.inputs()
            )));
        }
        let den = charpoly(&self.f)?;
        let closed = charpoly(&(&self.f - &self.g * &self.h))?;
        let mut num = &(&closed - &den) + &den.scale(self.j[(0, 0)]);
        let scale = den.norm_inf().max(closed.norm_inf()).max(1.0);
        num = trim_leading(num, 1e-12 * scale);
        RationalSiso::new(num, den)
    }
}

fn trim_leading(p: Polynomial, tol: f64) -> Polynomial {
    let mut c = p.coeffs().to_vec();
    while c.last().is_some_and(|v| v.abs() <= tol) {
        c.pop();
    }
    Polynomial::new(c)
}

#[derive(Serialize, Deserialize)]
pub(crate) struct StateSpaceJson {
    f: Vec<Vec<f64>>,
    g: Vec<Vec<f64>>,
    h: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    j: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gw: Option<Vec<Vec<f64>>>,
}

impl TryFrom<StateSpaceJson> for StateSpace {
    type Error = Error;

    fn try_from(raw: StateSpaceJson) -> Result<Self> {
        let n = raw.f.len();
        let f = matrix_from_rows(&raw.f, n)?;
        let nu = match (&raw.j, raw.g.first()) {
            (_, Some(r)) if !r.is_empty() => r.len(),
            (Some(j), _) => j.first().map_or(0, Vec::len),
            _ => 0,
        };
        let g = matrix_from_rows(&raw.g, nu)?;
        let g = if g.nrows() == 0 && n == 0 { Matrix::zeros(0, nu) } else { g };
        let h = matrix_from_rows(&raw.h, n)?;
        let ny = match &raw.j {
            Some(j) if h.nrows() == 0 => j.len(),
            _ => h.nrows(),
        };
        let h = if h.nrows() == 0 { Matrix::zeros(ny, n) } else { h };
        let j = match &raw.j {
            Some(rows) => matrix_from_rows(rows, nu)?,
            None => Matrix::zeros(ny, nu),
        };
        let sys = StateSpace::new(f, g, h, j)?;
        match raw.gw {
            Some(rows) => sys.with_gw(matrix_from_rows(&rows, 0)?),
            None => Ok(sys),
        }
    }
}

impl From<&StateSpace> for StateSpaceJson {
    fn from(s: &StateSpace) -> Self {
        Self {
            f: matrix_rows(&s.f),
            g: matrix_rows(&s.g),
            h: matrix_rows(&s.h),
            j: Some(matrix_rows(&s.j)),
            gw: s.gw.as_ref().map(matrix_rows),
        }
    }
}

impl Serialize for StateSpace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateSpaceJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateSpace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = StateSpaceJson::deserialize(deserializer)?;
        StateSpace::try_from(raw).map_err(serde::de::Error::custom)
    }
}
