//! Extended Estimator design: an observer over the plant state and the
//! signal-generator state, whose generator estimate is cancelled at the
//! plant input.
//!
//! The generator is modelled as an equivalent input `C eta` with
//! `eta' = A eta`. The observer is driven by `y - r`, the output error of
//! the equivalent system, and the control is `u = -K_zx z_hat - C eta_hat`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exogenous::SignalModel;
use crate::internal_model::require_siso_strictly_proper;
use crate::lti::{transmission_zeros, StateSpace};
use crate::numlin::{column, eigenvalues, matrix_from_rows, matrix_rows, row, Complex, Matrix};
use crate::placement::{place, place_estimator};
use crate::sim::{ClosedLoop, ErrorTap};

/// Distance within which a plant zero is considered to sit on a generator
/// eigenvalue.
pub const ZERO_COINCIDENCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct XestController {
    pub k_zx: Matrix,
    pub l_zx: Matrix,
    pub l_nx: Matrix,
    pub model: SignalModel,
    pub plant_model: StateSpace,
}

/// Extended system `[[F, G C], [0, A]]` with input `[G; 0]` and output
/// `[H, 0]`.
pub fn build_extended(plant: &StateSpace, model: &SignalModel) -> Result<StateSpace> {
    require_siso_strictly_proper(plant)?;
    let modes = eigenvalues(&model.a)?;
    let zeros = transmission_zeros(plant)?;
    if let Some((z, p)) =
        zeros.iter().flat_map(|z| modes.iter().map(move |p| (z, p))).find(|(z, p)| (*z - *p).norm() <= ZERO_COINCIDENCE)
    {
        return Err(Error::Infeasible(format!(
            "plant zero {:.6}{:+.6}i coincides with generator eigenvalue {:.6}{:+.6}i",
            z.re, z.im, p.re, p.im
        )));
    }
    let (n, m) = (plant.order(), model.degree());
    let mut f = Matrix::zeros(n + m, n + m);
    f.view_mut((0, 0), (n, n)).copy_from(&plant.f);
    f.view_mut((0, n), (n, m)).copy_from(&(&plant.g * &model.c));
    f.view_mut((n, n), (m, m)).copy_from(&model.a);
    let mut g = Matrix::zeros(n + m, 1);
    g.view_mut((0, 0), (n, 1)).copy_from(&plant.g);
    let mut h = Matrix::zeros(1, n + m);
    h.view_mut((0, 0), (1, n)).copy_from(&plant.h);
    StateSpace::strictly_proper(f, g, h)
}

/// `n` control poles for `F - G K_zx` and `n + m` estimator poles for the
/// extended observer.
pub fn design_xest(
    plant: &StateSpace,
    model: &SignalModel,
    control_poles: &[Complex],
    estimator_poles: &[Complex],
) -> Result<XestController> {
    let ext = build_extended(plant, model)?;
    let n = plant.order();
    let m = model.degree();
    let k_zx = place(&plant.f, &plant.g, control_poles)?;
    let l = place_estimator(&ext.f, &ext.h, estimator_poles)?;
    Ok(XestController {
        k_zx,
        l_zx: l.rows(0, n).into_owned(),
        l_nx: l.rows(n, m).into_owned(),
        model: model.clone(),
        plant_model: plant.clone(),
    })
}

impl XestController {
    /// Observer error matrix `F_ext - L H_ext`.
    pub fn estimator_matrix(&self) -> Result<Matrix> {
        let ext = build_extended_unchecked(&self.plant_model, &self.model);
        let l = self.gain();
        Ok(&ext.f - &l * &ext.h)
    }

    fn gain(&self) -> Matrix {
        let (n, m) = (self.l_zx.nrows(), self.l_nx.nrows());
        let mut l = Matrix::zeros(n + m, 1);
        l.view_mut((0, 0), (n, 1)).copy_from(&self.l_zx);
        l.view_mut((n, 0), (m, 1)).copy_from(&self.l_nx);
        l
    }

    /// Controller from the tracking error `e = r - y` to `u`, state
    /// `[z_hat; eta_hat]`.
    ///
    /// The state matrix is `[[F - L_zx H - G K_zx, 0], [-L_nx H, A]]`; its
    /// block-triangular form puts `eig(A)` in the controller spectrum.
    pub fn controller_realization(&self) -> Result<StateSpace> {
        let p = &self.plant_model;
        let (n, m) = (p.order(), self.model.degree());
        let mut f = Matrix::zeros(n + m, n + m);
        f.view_mut((0, 0), (n, n)).copy_from(&(&p.f - &self.l_zx * &p.h - &p.g * &self.k_zx));
        f.view_mut((n, 0), (m, n)).copy_from(&(-(&self.l_nx * &p.h)));
        f.view_mut((n, n), (m, m)).copy_from(&self.model.a);
        let g = -self.gain();
        let mut h = Matrix::zeros(1, n + m);
        h.view_mut((0, 0), (1, n)).copy_from(&(-&self.k_zx));
        h.view_mut((0, n), (1, m)).copy_from(&(-&self.model.c));
        StateSpace::strictly_proper(f, g, h)
    }

    /// Loop gain broken at the plant input (state `[x; z_hat; eta_hat]`),
    /// mapping the injected input to `-u`.
    pub fn loop_at_plant_input(&self) -> Result<StateSpace> {
        let cl = self.assemble(&self.plant_model, f64::INFINITY)?;
        StateSpace::strictly_proper(cl.a, cl.b_u, -cl.u_x)
    }

    fn assemble(&self, plant: &StateSpace, sat_limit: f64) -> Result<ClosedLoop> {
        let nom = &self.plant_model;
        let (n, m) = (nom.order(), self.model.degree());
        let (a, c) = (&self.model.a, &self.model.c);
        let dim = 2 * n + m;
        let mut cl_a = Matrix::zeros(dim, dim);
        cl_a.view_mut((0, 0), (n, n)).copy_from(&plant.f);
        cl_a.view_mut((n, 0), (n, n)).copy_from(&(&self.l_zx * &plant.h));
        cl_a.view_mut((n, n), (n, n)).copy_from(&(&nom.f - &self.l_zx * &nom.h));
        cl_a.view_mut((n, 2 * n), (n, m)).copy_from(&(&nom.g * c));
        cl_a.view_mut((2 * n, 0), (m, n)).copy_from(&(&self.l_nx * &plant.h));
        cl_a.view_mut((2 * n, n), (m, n)).copy_from(&(-(&self.l_nx * &nom.h)));
        cl_a.view_mut((2 * n, 2 * n), (m, m)).copy_from(a);
        let mut b_r = Matrix::zeros(dim, 1);
        b_r.view_mut((n, 0), (n, 1)).copy_from(&(-&self.l_zx));
        b_r.view_mut((2 * n, 0), (m, 1)).copy_from(&(-&self.l_nx));
        let mut b_w = Matrix::zeros(dim, 1);
        b_w.view_mut((0, 0), (n, 1)).copy_from(plant.gw());
        let mut b_u = Matrix::zeros(dim, 1);
        b_u.view_mut((0, 0), (n, 1)).copy_from(&plant.g);
        b_u.view_mut((n, 0), (n, 1)).copy_from(&nom.g);
        let mut u_x = Matrix::zeros(1, dim);
        u_x.view_mut((0, n), (1, n)).copy_from(&(-&self.k_zx));
        u_x.view_mut((0, 2 * n), (1, m)).copy_from(&(-c));
        let mut y_x = Matrix::zeros(1, dim);
        y_x.view_mut((0, 0), (1, n)).copy_from(&plant.h);
        let cl = ClosedLoop {
            a: cl_a,
            b_r,
            b_w,
            b_u,
            u_x,
            u_r: 0.0,
            y_x,
            eta_x: None,
            x0: Matrix::zeros(dim, 1),
            sat_limit,
            error_tap: ErrorTap::ReferenceMinusOutput,
        };
        cl.validate()?;
        Ok(cl)
    }
}

fn build_extended_unchecked(plant: &StateSpace, model: &SignalModel) -> StateSpace {
    let (n, m) = (plant.order(), model.degree());
    let mut f = Matrix::zeros(n + m, n + m);
    f.view_mut((0, 0), (n, n)).copy_from(&plant.f);
    f.view_mut((0, n), (n, m)).copy_from(&(&plant.g * &model.c));
    f.view_mut((n, n), (m, m)).copy_from(&model.a);
    let mut g = Matrix::zeros(n + m, 1);
    g.view_mut((0, 0), (n, 1)).copy_from(&plant.g);
    let mut h = Matrix::zeros(1, n + m);
    h.view_mut((0, 0), (1, n)).copy_from(&plant.h);
    StateSpace::strictly_proper(f, g, h).expect("blocks are consistent")
}

/// Closed loop with state `[x; z_hat; eta_hat]`.
///
/// The physical plant sees `sat(u)`; the observer propagates the nominal
/// model with the same saturated input and is corrected by
/// `(y - r) - H z_hat`.
pub fn realize_closed_loop_xest(plant: &StateSpace, ctrl: &XestController, sat_limit: f64) -> Result<ClosedLoop> {
    require_siso_strictly_proper(plant)?;
    if plant.order() != ctrl.plant_model.order() {
        return Err(Error::Dimension(format!(
            "plant order {} does not match controller order {}",
            plant.order(),
            ctrl.plant_model.order()
        )));
    }
    ctrl.assemble(plant, sat_limit)
}

/// Serialized form. `b` is optional on input and defaults to `e_1`; it is
/// not used by the control law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XestControllerJson {
    pub kzx: Vec<f64>,
    pub lzx: Vec<f64>,
    pub lnx: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
}

impl From<&XestController> for XestControllerJson {
    fn from(x: &XestController) -> Self {
        Self {
            kzx: x.k_zx.iter().copied().collect(),
            lzx: x.l_zx.iter().copied().collect(),
            lnx: x.l_nx.iter().copied().collect(),
            a: matrix_rows(&x.model.a),
            c: x.model.c.iter().copied().collect(),
            b: Some(x.model.b.iter().copied().collect()),
        }
    }
}

impl XestControllerJson {
    pub fn into_controller(self, plant: &StateSpace) -> Result<XestController> {
        require_siso_strictly_proper(plant)?;
        let n = plant.order();
        let a = matrix_from_rows(&self.a, self.a.len())?;
        let m = a.nrows();
        let b = match self.b {
            Some(b) => column(&b),
            None => Matrix::from_fn(m, 1, |i, _| if i == 0 { 1.0 } else { 0.0 }),
        };
        if self.kzx.len() != n || self.lzx.len() != n || self.lnx.len() != m || self.c.len() != m {
            return Err(Error::Dimension(format!(
                "controller has kzx {}, lzx {}, lnx {}, c {} for plant order {n} and generator order {m}",
                self.kzx.len(),
                self.lzx.len(),
                self.lnx.len(),
                self.c.len()
            )));
        }
        let model = SignalModel::from_matrices(a, b, row(&self.c))?;
        Ok(XestController {
            k_zx: row(&self.kzx),
            l_zx: column(&self.lzx),
            l_nx: column(&self.lnx),
            model,
            plant_model: plant.clone(),
        })
    }
}
