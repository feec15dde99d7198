//! Internal Model design: the signal dynamics `d(s)` are built into the
//! compensator, driven by the tracking error `e = r - y`.
//!
//! Gains come from pole placement on the composite of the plant and the
//! error chain; the plant state is reconstructed by a standard observer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exogenous::{build_error_chain, SignalModel};
use crate::lti::{RationalSiso, StateSpace};
use crate::numlin::{column, row, Complex, Matrix, Polynomial};
use crate::placement::{place, place_estimator};
use crate::sim::{ClosedLoop, ErrorTap};

/// Internal Model controller.
///
/// The compensator state obeys `eta' = A eta + B (r - y)` with `(A, B)` the
/// error chain of `d`, and the control is `u = -K_z x_hat + K_eta eta`, so
/// the error enters through `c(s) / d(s)` with `c(s) = K_eta adj(sI - A) B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImController {
    pub k_z: Matrix,
    pub k_eta: Matrix,
    pub d: Polynomial,
    pub l_x: Matrix,
    pub plant_model: StateSpace,
}

/// Plant plus error chain: `[[F, 0], [B H, A]]` with input `[G; 0]`.
pub fn build_composite(plant: &StateSpace, d: &Polynomial) -> Result<StateSpace> {
    require_siso_strictly_proper(plant)?;
    let (a, b) = build_error_chain(d)?;
    let (n, m) = (plant.order(), a.nrows());
    let mut f = Matrix::zeros(n + m, n + m);
    f.view_mut((0, 0), (n, n)).copy_from(&plant.f);
    f.view_mut((n, 0), (m, n)).copy_from(&(&b * &plant.h));
    f.view_mut((n, n), (m, m)).copy_from(&a);
    let mut g = Matrix::zeros(n + m, 1);
    g.view_mut((0, 0), (n, 1)).copy_from(&plant.g);
    let mut h = Matrix::zeros(1, n + m);
    h.view_mut((0, 0), (1, n)).copy_from(&plant.h);
    StateSpace::strictly_proper(f, g, h)
}

pub(crate) fn require_siso_strictly_proper(plant: &StateSpace) -> Result<()> {
    if !plant.is_siso() {
        return Err(Error::Domain(format!(
            "design needs a single-input single-output plant, got {} outputs and {} inputs",
            plant.outputs(),
            plant.inputs()
        )));
    }
    if plant.j[(0, 0)] != 0.0 {
        return Err(Error::Domain("design needs a strictly proper plant (J = 0)".into()));
    }
    if plant.gw().ncols() != 1 {
        return Err(Error::Domain("design supports a single disturbance input".into()));
    }
    Ok(())
}

/// Places `n + m` control poles on the composite and `n` estimator poles on
/// the plant.
pub fn design_im(
    plant: &StateSpace,
    model: &SignalModel,
    control_poles: &[Complex],
    estimator_poles: &[Complex],
) -> Result<ImController> {
    let composite = build_composite(plant, &model.d)?;
    let n = plant.order();
    let m = model.degree();
    let k = place(&composite.f, &composite.g, control_poles)?;
    let l_x = place_estimator(&plant.f, &plant.h, estimator_poles)?;
    Ok(ImController {
        k_z: k.columns(0, n).into_owned(),
        k_eta: k.columns(n, m).into_owned(),
        d: model.d.clone(),
        l_x,
        plant_model: plant.clone(),
    })
}

impl ImController {
    /// Error chain `(A, B)` of the embedded model.
    pub fn chain(&self) -> (Matrix, Matrix) {
        build_error_chain(&self.d).expect("controller model has degree >= 1")
    }

    /// Error-to-control compensator `c(s) / d(s)`.
    pub fn compensator(&self) -> Result<RationalSiso> {
        let (a, b) = self.chain();
        let ss = StateSpace::strictly_proper(a, b, self.k_eta.clone())?;
        ss.to_rational()
    }

    /// `c(s)` as a polynomial, without cancelling against `d(s)`.
    pub fn compensator_numerator(&self) -> Polynomial {
        // In top-row companion form adj(sI - A) e_1 = [s^{m-1}, ..., s, 1]^T.
        let m = self.k_eta.ncols();
        Polynomial::new((0..m).map(|k| self.k_eta[(0, m - 1 - k)]).collect())
    }

    /// Loop gain broken at the plant input (state `[x; x_hat; eta]`).
    ///
    /// With `v` the injected plant input and `r = w = 0`, the returned
    /// system maps `v` to `-u`, so unity negative feedback closes the
    /// designed loop. The observer error modes are uncontrollable from `v`
    /// and appear in both the open- and closed-loop spectra.
    pub fn loop_at_plant_input(&self) -> Result<StateSpace> {
        let p = &self.plant_model;
        let (a, b) = self.chain();
        let (n, m) = (p.order(), a.nrows());
        let mut f = Matrix::zeros(2 * n + m, 2 * n + m);
        f.view_mut((0, 0), (n, n)).copy_from(&p.f);
        f.view_mut((n, 0), (n, n)).copy_from(&(&self.l_x * &p.h));
        f.view_mut((n, n), (n, n)).copy_from(&(&p.f - &self.l_x * &p.h));
        f.view_mut((2 * n, 0), (m, n)).copy_from(&(-(&b * &p.h)));
        f.view_mut((2 * n, 2 * n), (m, m)).copy_from(&a);
        let mut g = Matrix::zeros(2 * n + m, 1);
        g.view_mut((0, 0), (n, 1)).copy_from(&p.g);
        g.view_mut((n, 0), (n, 1)).copy_from(&p.g);
        let mut h = Matrix::zeros(1, 2 * n + m);
        h.view_mut((0, n), (1, n)).copy_from(&self.k_z);
        h.view_mut((0, 2 * n), (1, m)).copy_from(&(-&self.k_eta));
        StateSpace::strictly_proper(f, g, h)
    }
}

/// Closed loop with state `[x; x_hat; eta]` around the physical `plant`,
/// which may differ from the nominal model the controller was designed on.
pub fn realize_closed_loop_im(plant: &StateSpace, ctrl: &ImController, sat_limit: f64) -> Result<ClosedLoop> {
    require_siso_strictly_proper(plant)?;
    let nom = &ctrl.plant_model;
    let (n, m) = (nom.order(), ctrl.k_eta.ncols());
    if plant.order() != n {
        return Err(Error::Dimension(format!("plant order {} does not match controller order {n}", plant.order())));
    }
    let (a, b) = ctrl.chain();
    let dim = 2 * n + m;
    let mut cl_a = Matrix::zeros(dim, dim);
    cl_a.view_mut((0, 0), (n, n)).copy_from(&plant.f);
    cl_a.view_mut((n, 0), (n, n)).copy_from(&(&ctrl.l_x * &plant.h));
    cl_a.view_mut((n, n), (n, n)).copy_from(&(&nom.f - &ctrl.l_x * &nom.h));
    cl_a.view_mut((2 * n, 0), (m, n)).copy_from(&(-(&b * &plant.h)));
    cl_a.view_mut((2 * n, 2 * n), (m, m)).copy_from(&a);
    let mut b_r = Matrix::zeros(dim, 1);
    b_r.view_mut((2 * n, 0), (m, 1)).copy_from(&b);
    let mut b_w = Matrix::zeros(dim, 1);
    b_w.view_mut((0, 0), (n, 1)).copy_from(plant.gw());
    let mut b_u = Matrix::zeros(dim, 1);
    b_u.view_mut((0, 0), (n, 1)).copy_from(&plant.g);
    b_u.view_mut((n, 0), (n, 1)).copy_from(&nom.g);
    let mut u_x = Matrix::zeros(1, dim);
    u_x.view_mut((0, n), (1, n)).copy_from(&(-&ctrl.k_z));
    u_x.view_mut((0, 2 * n), (1, m)).copy_from(&ctrl.k_eta);
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

/// Serialized form: gains and `d` coefficients (ascending).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImControllerJson {
    pub kz: Vec<f64>,
    pub keta: Vec<f64>,
    pub d: Vec<f64>,
    pub lx: Vec<f64>,
}

impl From<&ImController> for ImControllerJson {
    fn from(c: &ImController) -> Self {
        Self {
            kz: c.k_z.iter().copied().collect(),
            keta: c.k_eta.iter().copied().collect(),
            d: c.d.coeffs().to_vec(),
            lx: c.l_x.iter().copied().collect(),
        }
    }
}

impl ImControllerJson {
    /// Rebuilds the controller around the nominal plant it was designed on.
    pub fn into_controller(self, plant: &StateSpace) -> Result<ImController> {
        let d = Polynomial::try_from(self.d)?.monic()?;
        let m = d.degree().unwrap_or(0);
        let n = plant.order();
        if self.kz.len() != n || self.lx.len() != n || self.keta.len() != m || m == 0 {
            return Err(Error::Dimension(format!(
                "controller has kz {}, lx {}, keta {}, d degree {m}; plant order is {n}",
                self.kz.len(),
                self.lx.len(),
                self.keta.len()
            )));
        }
        require_siso_strictly_proper(plant)?;
        Ok(ImController {
            k_z: row(&self.kz),
            k_eta: row(&self.keta),
            d,
            l_x: column(&self.lx),
            plant_model: plant.clone(),
        })
    }
}
