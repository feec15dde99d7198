//! Model Following design: `u = N z - K (x - M z)` with the model state `z`
//! running open loop, so that `x - M z` obeys `F - G K`.
//!
//! `(M, N)` solve `F M - M A + G N = 0` and `H M = C`. Tracking is exact on
//! the nominal plant only; there is no error feedback.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exogenous::SignalModel;
use crate::internal_model::require_siso_strictly_proper;
use crate::lti::StateSpace;
use crate::numlin::{
    column, complexify, eigenvalues, matrix_from_rows, matrix_rows, row, solve_linear, CMatrix, Complex, Matrix,
};
use crate::placement::place;
use crate::sim::{ClosedLoop, ErrorTap};

/// Relative tolerance of the gain-equation residual checks.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct MfController {
    pub k: Matrix,
    pub m: Matrix,
    pub n_ff: Matrix,
    pub model: SignalModel,
    pub plant_model: StateSpace,
}

/// Residual norms `(|F M - M A + G N|, |H M - C|)` (Frobenius).
pub fn mf_residuals(plant: &StateSpace, a: &Matrix, c: &Matrix, m: &Matrix, n_ff: &Matrix) -> (f64, f64) {
    let r1 = &plant.f * m - m * a + &plant.g * n_ff;
    let r2 = &plant.h * m - c;
    (r1.norm(), r2.norm())
}

/// Solves for `(M, N)`.
///
/// The unknowns are stacked as `vec(M)` (column-major) followed by `N`;
/// with `q` model states the equations read
///
/// ```text
/// (I_q (x) F - A^T (x) I_n) vec M + (I_q (x) G) N^T = 0
/// (I_q (x) H) vec M                               = vec C
/// ```
pub fn solve_mf_gains(plant: &StateSpace, model_a: &Matrix, model_c: &Matrix) -> Result<(Matrix, Matrix)> {
    require_siso_strictly_proper(plant)?;
    let n = plant.order();
    let q = model_a.nrows();
    if model_a.ncols() != q || model_c.shape() != (1, q) {
        return Err(Error::Dimension(format!(
            "model A is {:?} and C is {:?}, expected square A and 1 x {q} C",
            model_a.shape(),
            model_c.shape()
        )));
    }
    let dim = n * q + q;
    let mut sys = Matrix::zeros(dim, dim);
    for j in 0..q {
        let rows = j * n;
        sys.view_mut((rows, rows), (n, n)).copy_from(&plant.f);
        for i in 0..q {
            let coef = model_a[(i, j)];
            if coef != 0.0 {
                let mut blk = sys.view_mut((rows, i * n), (n, n));
                for d in 0..n {
                    blk[(d, d)] -= coef;
                }
            }
        }
        sys.view_mut((rows, n * q + j), (n, 1)).copy_from(&plant.g);
        sys.view_mut((n * q + j, rows), (1, n)).copy_from(&plant.h);
    }
    let mut rhs = Matrix::zeros(dim, 1);
    for j in 0..q {
        rhs[(n * q + j, 0)] = model_c[(0, j)];
    }
    let sol = match solve_linear(&sys, &rhs) {
        Ok(sol) => sol,
        Err(Error::Singular { .. }) => return Err(infeasible(plant, model_a)),
        Err(e) => return Err(e),
    };
    let m = Matrix::from_column_slice(n, q, &sol.as_slice()[..n * q]);
    let n_ff = Matrix::from_row_slice(1, q, &sol.as_slice()[n * q..]);
    let (r1, r2) = mf_residuals(plant, model_a, model_c, &m, &n_ff);
    let scale = 1.0 + plant.f.norm() * m.norm();
    if !(r1 < RESIDUAL_TOLERANCE * scale && r2 < RESIDUAL_TOLERANCE) {
        return Err(Error::Numerical(format!("model-following residuals {r1:.3e} and {r2:.3e} exceed tolerance")));
    }
    Ok((m, n_ff))
}

/// Names the model eigenvalue at which the plant's Rosenbrock matrix is
/// closest to losing rank.
fn infeasible(plant: &StateSpace, model_a: &Matrix) -> Error {
    let n = plant.order();
    let worst = eigenvalues(model_a).ok().and_then(|modes| {
        modes
            .into_iter()
            .map(|lambda| {
                let mut p = CMatrix::zeros(n + 1, n + 1);
                let f = complexify(&plant.f);
                for i in 0..n {
                    for j in 0..n {
                        let diag = if i == j { lambda } else { Complex::new(0.0, 0.0) };
                        p[(i, j)] = diag - f[(i, j)];
                    }
                    p[(i, n)] = Complex::new(-plant.g[(i, 0)], 0.0);
                    p[(n, i)] = Complex::new(plant.h[(0, i)], 0.0);
                }
                let sv = p.singular_values();
                (lambda, sv.iter().copied().fold(f64::INFINITY, f64::min))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
    });
    match worst {
        Some((z, sigma)) => Error::Infeasible(format!(
            "model eigenvalue {:.6}{:+.6}i is a plant transmission zero (smallest singular value {sigma:.3e})",
            z.re, z.im
        )),
        None => Error::Infeasible("model-following equations are singular".into()),
    }
}

/// `n` control poles for `F - G K`, plus the `(M, N)` solve.
pub fn design_mf(plant: &StateSpace, model: &SignalModel, control_poles: &[Complex]) -> Result<MfController> {
    require_siso_strictly_proper(plant)?;
    let k = place(&plant.f, &plant.g, control_poles)?;
    let (m, n_ff) = solve_mf_gains(plant, &model.a, &model.c)?;
    Ok(MfController { k, m, n_ff, model: model.clone(), plant_model: plant.clone() })
}

impl MfController {
    /// Feedforward row acting on `z`: `N + K M`.
    pub fn model_gain(&self) -> Matrix {
        &self.n_ff + &self.k * &self.m
    }
}

/// Closed loop with state `[x; z]`, `z' = A z` from `z(0) = B`.
///
/// The reference input is unused; the trace error is `y - eta` with
/// `eta = C z`.
pub fn realize_closed_loop_mf(plant: &StateSpace, ctrl: &MfController, sat_limit: f64) -> Result<ClosedLoop> {
    require_siso_strictly_proper(plant)?;
    let n = ctrl.plant_model.order();
    let q = ctrl.model.degree();
    if plant.order() != n {
        return Err(Error::Dimension(format!("plant order {} does not match controller order {n}", plant.order())));
    }
    let dim = n + q;
    let mut a = Matrix::zeros(dim, dim);
    a.view_mut((0, 0), (n, n)).copy_from(&plant.f);
    a.view_mut((n, n), (q, q)).copy_from(&ctrl.model.a);
    let mut b_w = Matrix::zeros(dim, 1);
    b_w.view_mut((0, 0), (n, 1)).copy_from(plant.gw());
    let mut b_u = Matrix::zeros(dim, 1);
    b_u.view_mut((0, 0), (n, 1)).copy_from(&plant.g);
    let mut u_x = Matrix::zeros(1, dim);
    u_x.view_mut((0, 0), (1, n)).copy_from(&(-&ctrl.k));
    u_x.view_mut((0, n), (1, q)).copy_from(&ctrl.model_gain());
    let mut y_x = Matrix::zeros(1, dim);
    y_x.view_mut((0, 0), (1, n)).copy_from(&plant.h);
    let mut eta_x = Matrix::zeros(1, dim);
    eta_x.view_mut((0, n), (1, q)).copy_from(&ctrl.model.c);
    let mut x0 = Matrix::zeros(dim, 1);
    x0.view_mut((n, 0), (q, 1)).copy_from(&ctrl.model.b);
    let cl = ClosedLoop {
        a,
        b_r: Matrix::zeros(dim, 1),
        b_w,
        b_u,
        u_x,
        u_r: 0.0,
        y_x,
        eta_x: Some(eta_x),
        x0,
        sat_limit,
        error_tap: ErrorTap::OutputMinusModel,
    };
    cl.validate()?;
    Ok(cl)
}

/// Serialized form. The model matrices are written alongside the gains;
/// on input they are optional and default to the unit oscillator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfControllerJson {
    pub k: Vec<f64>,
    pub m: Vec<Vec<f64>>,
    pub n: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
}

impl From<&MfController> for MfControllerJson {
    fn from(x: &MfController) -> Self {
        Self {
            k: x.k.iter().copied().collect(),
            m: matrix_rows(&x.m),
            n: x.n_ff.iter().copied().collect(),
            a: Some(matrix_rows(&x.model.a)),
            b: Some(x.model.b.iter().copied().collect()),
            c: Some(x.model.c.iter().copied().collect()),
        }
    }
}

impl MfControllerJson {
    pub fn into_controller(self, plant: &StateSpace) -> Result<MfController> {
        require_siso_strictly_proper(plant)?;
        let order = plant.order();
        let q = self.n.len();
        let model = match self.a {
            Some(a) => {
                let a = matrix_from_rows(&a, q)?;
                let b = self.b.map(|b| column(&b)).unwrap_or_else(|| unit(q));
                let c = self.c.map(|c| row(&c)).unwrap_or_else(|| unit(q).transpose());
                SignalModel::from_matrices(a, b, c)?
            }
            None => SignalModel::sine(1.0)?,
        };
        let m = matrix_from_rows(&self.m, q)?;
        if self.k.len() != order || m.nrows() != order || model.degree() != q {
            return Err(Error::Dimension(format!(
                "controller has k {}, m {:?}, n {} for plant order {order} and model order {}",
                self.k.len(),
                m.shape(),
                q,
                model.degree()
            )));
        }
        Ok(MfController { k: row(&self.k), m, n_ff: row(&self.n), model, plant_model: plant.clone() })
    }
}

fn unit(q: usize) -> Matrix {
    Matrix::from_fn(q, 1, |i, _| if i == 0 { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::RationalSiso;
    use crate::numlin::{spectrum_distance, Polynomial};
    use crate::sim::{simulate, SignalSpec};

    fn servo() -> StateSpace {
        StateSpace::strictly_proper(
            Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, -1.0]),
            column(&[0.0, 1.0]),
            row(&[1.0, 0.0]),
        )
        .unwrap()
    }

    fn poles() -> Vec<Complex> {
        let s3 = 3f64.sqrt();
        vec![Complex::new(-1.0, s3), Complex::new(-1.0, -s3)]
    }

    fn oscillator() -> SignalModel {
        SignalModel::sine(1.0).unwrap()
    }

    #[test]
    fn oscillator_gains_satisfy_both_equations() {
        let model = oscillator();
        let (m, n) = solve_mf_gains(&servo(), &model.a, &model.c).unwrap();
        let (r1, r2) = mf_residuals(&servo(), &model.a, &model.c, &m, &n);
        assert!(r1 < 1e-10 && r2 < 1e-10, "{r1} {r2}");
    }

    #[test]
    fn identity_following() {
        let p = servo();
        let (m, n) = solve_mf_gains(&p, &p.f, &p.h).unwrap();
        assert!((m - Matrix::identity(2, 2)).amax() < 1e-10);
        assert!(n.amax() < 1e-10);
    }

    #[test]
    fn zero_on_model_mode_is_infeasible() {
        let plant = RationalSiso::new(Polynomial::new(vec![1.0, 0.0, 1.0]), Polynomial::new(vec![1.0, 3.0, 3.0, 1.0]))
            .unwrap()
            .to_state_space()
            .unwrap();
        let model = oscillator();
        match solve_mf_gains(&plant, &model.a, &model.c) {
            Err(Error::Infeasible(msg)) => assert!(msg.contains("1.000000i"), "{msg}"),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn design_places_control_poles() {
        let x = design_mf(&servo(), &oscillator(), &poles()).unwrap();
        assert!((x.k[(0, 0)] - 4.0).abs() < 1e-8 && (x.k[(0, 1)] - 1.0).abs() < 1e-8);
        let acl = &servo().f - &servo().g * &x.k;
        assert!(spectrum_distance(&eigenvalues(&acl).unwrap(), &poles()) < 1e-6);
    }

    #[test]
    fn transform_identity_holds_off_the_spectra() {
        let p = servo();
        let x = design_mf(&p, &oscillator(), &poles()).unwrap();
        let (f, g) = (complexify(&p.f), complexify(&p.g));
        let (a, b) = (complexify(&x.model.a), complexify(&x.model.b));
        let (k, m, nff) = (complexify(&x.k), complexify(&x.m), complexify(&x.n_ff));
        let inv = |mat: CMatrix| mat.try_inverse().unwrap();
        for s in [Complex::new(0.3, 2.0), Complex::new(-0.5, 0.7), Complex::new(2.0, -1.0), Complex::new(0.1, 0.0)] {
            let sn = CMatrix::identity(2, 2) * s;
            let cl = inv(&sn - &f + &g * &k);
            let model = inv(&sn - &a) * &b;
            let lhs = &cl * (&g * &nff + &g * &k * &m) * &model;
            let rhs = &m * &model - &cl * &m * &b;
            assert!((lhs - rhs).iter().all(|v| v.norm() < 1e-8));
        }
    }

    #[test]
    fn rest_state_is_equilibrium() {
        let x = design_mf(&servo(), &oscillator(), &poles()).unwrap();
        let cl = realize_closed_loop_mf(&servo(), &x, f64::INFINITY).unwrap();
        let cl = cl.clone().with_initial_state(Matrix::zeros(cl.order(), 1)).unwrap();
        let tr = simulate(&cl, &SignalSpec::zero(), &SignalSpec::zero(), 2.0, 1e-2).unwrap();
        assert!(tr.y.iter().chain(&tr.u).all(|&v| v == 0.0));
    }

    #[test]
    fn nominal_output_follows_model() {
        let x = design_mf(&servo(), &oscillator(), &poles()).unwrap();
        let cl = realize_closed_loop_mf(&servo(), &x, f64::INFINITY).unwrap();
        let tr = simulate(&cl, &SignalSpec::zero(), &SignalSpec::zero(), 25.0, 1e-3).unwrap();
        let late = tr.t.iter().zip(&tr.e).filter(|(t, _)| **t > 20.0).fold(0.0f64, |m, (_, e)| m.max(e.abs()));
        assert!(late < 1e-3, "{late}");
    }

    #[test]
    fn perturbed_plant_keeps_an_error() {
        let x = design_mf(&servo(), &oscillator(), &poles()).unwrap();
        let bent = servo().with_f_entry(1, 1, -1.1).unwrap();
        let cl = realize_closed_loop_mf(&bent, &x, f64::INFINITY).unwrap();
        let tr = simulate(&cl, &SignalSpec::zero(), &SignalSpec::zero(), 25.0, 1e-3).unwrap();
        let late = tr.t.iter().zip(&tr.e).filter(|(t, _)| **t > 20.0).fold(0.0f64, |m, (_, e)| m.max(e.abs()));
        assert!(late > 1e-3, "{late}");
    }

    #[test]
    fn json_round_trip_is_exact() {
        let x = design_mf(&servo(), &oscillator(), &poles()).unwrap();
        let text = serde_json::to_string(&MfControllerJson::from(&x)).unwrap();
        let back: MfControllerJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_controller(&servo()).unwrap(), x);
        let bare: MfControllerJson = serde_json::from_str(r#"{"k":[4,1],"m":[[1,0],[0,1]],"n":[1,0]}"#).unwrap();
        assert_eq!(bare.into_controller(&servo()).unwrap().model, oscillator());
    }
}
