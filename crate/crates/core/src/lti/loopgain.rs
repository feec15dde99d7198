use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{transmission_zeros, RationalSiso, StateSpace};
use crate::error::{Error, Result};
use crate::numlin::{complexify, eigenvalues, ln_abs_det, poly_roots, CMatrix, Complex, Matrix, Polynomial};

/// Magnitude under which an open-loop pole counts as sitting at the origin.
pub const ORIGIN_TOLERANCE: f64 = 1e-7;

const TYPE_PROBE: f64 = 1e-4;
const TYPE_CONDITION_LIMIT: f64 = 1e10;

/// Square loop transfer matrix, either as a scalar rational function or as
/// a minimal state-space realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "RawLoop")]
pub enum LoopGain {
    Rational(RationalSiso),
    StateSpace(StateSpace),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawLoop {
    Rational(RationalSiso),
    StateSpace(StateSpace),
}

impl TryFrom<RawLoop> for LoopGain {
    type Error = Error;

    fn try_from(raw: RawLoop) -> Result<Self> {
        match raw {
            RawLoop::Rational(tf) => Ok(Self::Rational(tf)),
            RawLoop::StateSpace(ss) => Self::state_space(ss),
        }
    }
}

impl LoopGain {
    pub fn rational(tf: RationalSiso) -> Self {
        Self::Rational(tf)
    }

    /// Wraps a realization; it must be square.
    pub fn state_space(ss: StateSpace) -> Result<Self> {
        if ss.inputs() != ss.outputs() {
            return Err(Error::Dimension(format!(
                "loop gain must be square, got {} outputs and {} inputs",
                ss.outputs(),
                ss.inputs()
            )));
        }
        Ok(Self::StateSpace(ss))
    }

    /// Number of loop channels.
    pub fn channels(&self) -> usize {
        match self {
            Self::Rational(_) => 1,
            Self::StateSpace(ss) => ss.outputs(),
        }
    }

    pub fn is_siso(&self) -> bool {
        self.channels() == 1
    }

    pub fn order(&self) -> usize {
        match self {
            Self::Rational(tf) => tf.order(),
            Self::StateSpace(ss) => ss.order(),
        }
    }

    /// Scalar transfer function of a SISO loop.
    pub fn to_rational(&self) -> Result<RationalSiso> {
        match self {
            Self::Rational(tf) => Ok(tf.clone()),
            Self::StateSpace(ss) => ss.to_rational(),
        }
    }

    /// True when `L(s) -> 0` as `s -> infinity`.
    pub fn is_strictly_proper(&self) -> bool {
        match self {
            Self::Rational(tf) => tf.relative_degree().is_none_or(|r| r >= 1),
            Self::StateSpace(ss) => ss.j.iter().all(|&v| v == 0.0),
        }
    }

    /// Open-loop poles: roots of the open-loop characteristic polynomial.
    pub fn poles(&self) -> Result<Vec<Complex>> {
        match self {
            Self::Rational(tf) => tf.poles(),
            Self::StateSpace(ss) => ss.poles(),
        }
    }

    /// Closed-loop poles under unity negative feedback.
    pub fn closed_loop_poles(&self) -> Result<Vec<Complex>> {
        match self {
            Self::Rational(tf) => {
                if tf.relative_degree().is_some_and(|r| r < 0) {
                    return Err(Error::Domain("improper loop gain".into()));
                }
                let phi = tf.den() + tf.num();
                if phi.degree() != tf.den().degree() {
                    return Err(Error::Domain("I + L(s) vanishes at infinity (ill-posed loop)".into()));
                }
                poly_roots(&phi)
            }
            Self::StateSpace(_) => eigenvalues(&self.closed_loop_matrix()?),
        }
    }

    /// State matrix of the unity-feedback loop, `F - G (I + J)^-1 H`.
    pub fn closed_loop_matrix(&self) -> Result<Matrix> {
        let ss = match self {
            Self::StateSpace(ss) => ss.clone(),
            Self::Rational(tf) => tf.to_state_space()?,
        };
        let m = ss.outputs();
        let ij = Matrix::identity(m, m) + &ss.j;
        let x = ij.lu().solve(&ss.h).ok_or_else(|| Error::Domain("I + J is singular (ill-posed loop)".into()))?;
        Ok(&ss.f - &ss.g * x)
    }

    /// Finite zeros: numerator roots or transmission zeros.
    pub fn zeros(&self) -> Result<Vec<Complex>> {
        match self {
            Self::Rational(tf) => tf.zeros(),
            Self::StateSpace(ss) => transmission_zeros(ss),
        }
    }

    /// `L(s)` at a complex point.
    pub fn eval(&self, s: Complex) -> Result<CMatrix> {
        match self {
            Self::Rational(tf) => Ok(CMatrix::from_element(1, 1, tf.eval(s)?)),
            Self::StateSpace(ss) => ss.eval(s),
        }
    }

    /// `L(j omega)`.
    pub fn eval_freq(&self, omega: f64) -> Result<CMatrix> {
        self.eval(Complex::new(0.0, omega))
    }

    /// Sensitivity `S = (I + L)^-1` and complementary sensitivity
    /// `T = (I + L)^-1 L` at `j omega`.
    pub fn sens_eval(&self, omega: f64) -> Result<(CMatrix, CMatrix)> {
        let l = self.eval_freq(omega)?;
        let m = l.nrows();
        let rd = CMatrix::identity(m, m) + &l;
        let lu = rd.lu();
        let singular = || Error::ClosedLoopPoleOnAxis { omega };
        let s = lu.solve(&CMatrix::identity(m, m)).ok_or_else(singular)?;
        let t = lu.solve(&l).ok_or_else(singular)?;
        if s.iter().chain(t.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(singular());
        }
        Ok((s, t))
    }

    /// Loop Type: number of integrators common to every channel.
    ///
    /// SISO loops count denominator roots within [`ORIGIN_TOLERANCE`] of the
    /// origin after cancellation. MIMO loops are probed numerically: the
    /// singular values of `L(s)` at `s = 1e-4` and `2e-4` must all scale as
    /// `s^-k` for one integer `k`, and `s^k L(s)` must be well conditioned.
    pub fn system_type(&self) -> Result<usize> {
        if self.is_siso() {
            let tf = self.to_rational()?;
            let poles = tf.poles()?;
            return Ok(poles.iter().filter(|p| p.norm() < ORIGIN_TOLERANCE).count());
        }
        let s1 = Complex::new(TYPE_PROBE, 0.0);
        let s2 = Complex::new(2.0 * TYPE_PROBE, 0.0);
        let sv1 = complex_singular_values(&self.eval(s1)?);
        let sv2 = complex_singular_values(&self.eval(s2)?);
        if sv1.iter().chain(&sv2).any(|&v| v <= 0.0 || !v.is_finite()) {
            return Err(Error::UnsupportedType("loop gain is singular near s = 0".into()));
        }
        let mut k = None;
        for (a, b) in sv1.iter().zip(&sv2) {
            let slope = (a / b).ln() / std::f64::consts::LN_2;
            let r = slope.round();
            if (slope - r).abs() > 0.25 {
                return Err(Error::UnsupportedType(format!(
                    "singular value slope {slope:.3} near s = 0 is not an integer"
                )));
            }
            match k {
                None => k = Some(r),
                Some(prev) if prev != r => {
                    return Err(Error::UnsupportedType("channels have different numbers of integrators".into()))
                }
                _ => {}
            }
        }
        let k = k.unwrap_or(0.0);
        if k < 0.0 {
            return Err(Error::UnsupportedType("loop gain has a zero at the origin".into()));
        }
        let cond = sv1[0] / sv1[sv1.len() - 1];
        if cond >= TYPE_CONDITION_LIMIT {
            return Err(Error::UnsupportedType(format!(
                "s^{k} L(s) is ill conditioned near s = 0 (condition {cond:.3e})"
            )));
        }
        Ok(k as usize)
    }

    /// Precomputed factorization of `det(I + L)` and `det L` used to evaluate
    /// the sensitivity integrands without forming `L` near its poles.
    pub fn return_difference(&self) -> Result<ReturnDifference> {
        match self {
            Self::Rational(tf) => {
                let phi = tf.den() + tf.num();
                Ok(ReturnDifference::Rational { num: tf.num().clone(), den: tf.den().clone(), phi })
            }
            Self::StateSpace(ss) => {
                let m = ss.outputs();
                let n = ss.order();
                let ij = Matrix::identity(m, m) + &ss.j;
                let ln_det_ij = ij.determinant().abs().ln();
                let f_cl = self.closed_loop_matrix()?;
                let mut rosen_const = Matrix::zeros(n + m, n + m);
                rosen_const.view_mut((0, 0), (n, n)).copy_from(&(-&ss.f));
                rosen_const.view_mut((0, n), (n, m)).copy_from(&(-&ss.g));
                rosen_const.view_mut((n, 0), (m, n)).copy_from(&ss.h);
                rosen_const.view_mut((n, n), (m, m)).copy_from(&ss.j);
                Ok(ReturnDifference::StateSpace {
                    f: complexify(&ss.f),
                    f_cl: complexify(&f_cl),
                    rosenbrock: complexify(&rosen_const),
                    n,
                    ln_det_ij,
                })
            }
        }
    }
}

/// Factored evaluator for `ln|det S(s)|` and `ln|det T(s)|`.
///
/// With `phi_ol(s) = det(sI - F)` and `phi_cl(s) = det(sI - F_cl)`:
/// `det S = phi_ol / (phi_cl det(I + J))` and
/// `det T = det P(s) / (phi_cl det(I + J))`, where `P(s)` is the Rosenbrock
/// system matrix `[[sI - F, -G], [H, J]]`.
#[derive(Debug, Clone)]
pub enum ReturnDifference {
    Rational { num: Polynomial, den: Polynomial, phi: Polynomial },
    StateSpace { f: CMatrix, f_cl: CMatrix, rosenbrock: CMatrix, n: usize, ln_det_ij: f64 },
}

impl ReturnDifference {
    pub fn ln_abs_det_s(&self, s: Complex) -> f64 {
        match self {
            Self::Rational { den, phi, .. } => den.eval_complex(s).norm().ln() - phi.eval_complex(s).norm().ln(),
            Self::StateSpace { f, f_cl, ln_det_ij, .. } => {
                ln_abs_det(&shifted(f, s)) - ln_abs_det(&shifted(f_cl, s)) - ln_det_ij
            }
        }
    }

    pub fn ln_abs_det_t(&self, s: Complex) -> f64 {
        match self {
            Self::Rational { num, phi, .. } => num.eval_complex(s).norm().ln() - phi.eval_complex(s).norm().ln(),
            Self::StateSpace { f_cl, rosenbrock, n, ln_det_ij, .. } => {
                let mut p = rosenbrock.clone();
                for i in 0..*n {
                    p[(i, i)] += s;
                }
                ln_abs_det(&p) - ln_abs_det(&shifted(f_cl, s)) - ln_det_ij
            }
        }
    }
}

fn shifted(f: &CMatrix, s: Complex) -> CMatrix {
    let n = f.nrows();
    CMatrix::identity(n, n) * s - f
}

fn complex_singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = DMatrix::clone(m).svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
