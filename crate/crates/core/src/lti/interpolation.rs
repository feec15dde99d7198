use serde::Serialize;

use super::LoopGain;
use crate::error::Result;
use crate::numlin::{complexify, det, CMatrix, Complex, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Pole,
    Zero,
}

/// Sensitivity magnitudes at one right-half-plane pole or zero of the loop.
///
/// For scalar loops `s_mag` and `t_mag` are `|S|` and `|T|`; for MIMO loops
/// they are `|det S|` and `|det T|`, and only the determinant condition
/// (`det S = 0` at a pole, `det T = 0` at a zero) enters the residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationPoint {
    pub location: Complex,
    pub kind: PointKind,
    pub s_mag: f64,
    pub t_mag: f64,
    pub residual: f64,
}

/// Evaluates the interpolation conditions at every open right-half-plane
/// pole and zero of `l`. Violations are reported through `residual`.
pub fn check_interpolation(l: &LoopGain) -> Result<Vec<InterpolationPoint>> {
    let poles = l.poles()?;
    let zeros = l.zeros()?;
    let rhp = |v: &[Complex]| v.iter().copied().filter(|p| p.re > 0.0).collect::<Vec<_>>();
    let mut out = Vec::new();
    if l.is_siso() {
        let tf = l.to_rational()?;
        let phi = tf.den() + tf.num();
        let st = |s: Complex| {
            let den = tf.den().eval_complex(s);
            let num = tf.num().eval_complex(s);
            let cl = phi.eval_complex(s);
            ((den / cl).norm(), (num / cl).norm())
        };
        for p in rhp(&poles) {
            let (s, t) = st(p);
            out.push(InterpolationPoint {
                location: p,
                kind: PointKind::Pole,
                s_mag: s,
                t_mag: t,
                residual: s.max((t - 1.0).abs()),
            });
        }
        for z in rhp(&zeros) {
            let (s, t) = st(z);
            out.push(InterpolationPoint {
                location: z,
                kind: PointKind::Zero,
                s_mag: s,
                t_mag: t,
                residual: t.max((s - 1.0).abs()),
            });
        }
        return Ok(out);
    }

    let LoopGain::StateSpace(ss) = l else { unreachable!("MIMO loops are state space") };
    let (n, m) = (ss.order(), ss.outputs());
    let f = complexify(&ss.f);
    let f_cl = complexify(&l.closed_loop_matrix()?);
    let det_ij = (Matrix::identity(m, m) + &ss.j).determinant();
    let dets = |s: Complex| {
        let shift = |a: &CMatrix| CMatrix::identity(n, n) * s - a;
        let phi_ol = det(&shift(&f));
        let phi_cl = det(&shift(&f_cl));
        let mut p = CMatrix::zeros(n + m, n + m);
        p.view_mut((0, 0), (n, n)).copy_from(&shift(&f));
        p.view_mut((0, n), (n, m)).copy_from(&complexify(&(-&ss.g)));
        p.view_mut((n, 0), (m, n)).copy_from(&complexify(&ss.h));
        p.view_mut((n, n), (m, m)).copy_from(&complexify(&ss.j));
        let denom = phi_cl * det_ij;
        ((phi_ol / denom).norm(), (det(&p) / denom).norm())
    };
    for p in rhp(&poles) {
        let (s, t) = dets(p);
        out.push(InterpolationPoint { location: p, kind: PointKind::Pole, s_mag: s, t_mag: t, residual: s });
    }
    for z in rhp(&zeros) {
        let (s, t) = dets(z);
        out.push(InterpolationPoint { location: z, kind: PointKind::Zero, s_mag: s, t_mag: t, residual: t });
    }
    Ok(out)
}
