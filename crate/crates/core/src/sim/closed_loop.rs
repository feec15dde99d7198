use crate::error::{Error, Result};
use crate::numlin::Matrix;

/// Which signal the trace records as the tracking error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorTap {
    /// `e = r - y`.
    ReferenceMinusOutput,
    /// `e = y - eta`, output against a model output.
    OutputMinusModel,
}

/// Closed loop linear in its state except for a symmetric clamp on the
/// plant input:
///
/// ```text
/// x' = A x + Br r + Bw w + Bu sat(u)
/// u  = Ux x + ur r
/// y  = Yx x,  eta = Ex x (optional)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoop {
    pub a: Matrix,
    pub b_r: Matrix,
    pub b_w: Matrix,
    pub b_u: Matrix,
    pub u_x: Matrix,
    pub u_r: f64,
    pub y_x: Matrix,
    pub eta_x: Option<Matrix>,
    pub x0: Matrix,
    pub sat_limit: f64,
    pub error_tap: ErrorTap,
}

impl ClosedLoop {
    /// Checks shapes and the saturation limit (positive, possibly infinite).
    pub fn validate(&self) -> Result<()> {
        let n = self.a.nrows();
        let shapes = [
            ("a", self.a.shape(), (n, n)),
            ("b_r", self.b_r.shape(), (n, 1)),
            ("b_w", self.b_w.shape(), (n, 1)),
            ("b_u", self.b_u.shape(), (n, 1)),
            ("u_x", self.u_x.shape(), (1, n)),
            ("y_x", self.y_x.shape(), (1, n)),
            ("x0", self.x0.shape(), (n, 1)),
        ];
        for (name, got, want) in shapes {
            if got != want {
                return Err(Error::Dimension(format!("closed loop {name} is {got:?}, expected {want:?}")));
            }
        }
        if let Some(e) = &self.eta_x {
            if e.shape() != (1, n) {
                return Err(Error::Dimension(format!("closed loop eta_x is {:?}, expected (1, {n})", e.shape())));
            }
        }
        if self.sat_limit.is_nan() || self.sat_limit <= 0.0 {
            return Err(Error::Invalid(format!("saturation limit must be positive, got {}", self.sat_limit)));
        }
        if self.error_tap == ErrorTap::OutputMinusModel && self.eta_x.is_none() {
            return Err(Error::Invalid("model-following error tap needs an eta output".into()));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// State matrix with the clamp removed, `A + Bu Ux`.
    pub fn linear_matrix(&self) -> Matrix {
        &self.a + &self.b_u * &self.u_x
    }

    pub fn with_initial_state(mut self, x0: Matrix) -> Result<Self> {
        if x0.shape() != (self.order(), 1) {
            return Err(Error::Dimension(format!("initial state is {:?}, expected ({}, 1)", x0.shape(), self.order())));
        }
        self.x0 = x0;
        Ok(self)
    }

    pub(crate) fn control(&self, x: &Matrix, r: f64) -> f64 {
        let u = (&self.u_x * x)[(0, 0)] + self.u_r * r;
        u.clamp(-self.sat_limit, self.sat_limit)
    }

    pub(crate) fn derivative(&self, x: &Matrix, r: f64, w: f64) -> Matrix {
        let u = self.control(x, r);
        &self.a * x + &self.b_r * r + &self.b_w * w + &self.b_u * u
    }
}
