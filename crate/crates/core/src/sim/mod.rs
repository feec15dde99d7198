//! Fixed-step simulation of clamped closed loops.

mod closed_loop;
mod signal;

pub use closed_loop::{ClosedLoop, ErrorTap};
pub use signal::{gen_signal, SignalKind, SignalSpec};

use std::io::Write;

use crate::error::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_HORIZON: f64 = 25.0;

/// Sampled closed-loop signals on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub e: Vec<f64>,
    pub eta: Option<Vec<f64>>,
    pub h: f64,
    pub method: &'static str,
    pub final_state: Vec<f64>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Writes `t,r,w,y,u,e[,eta]` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let with_eta = self.eta.is_some();
        writeln!(out, "t,r,w,y,u,e{}", if with_eta { ",eta" } else { "" })?;
        for k in 0..self.len() {
            write!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.t[k], self.r[k], self.w[k], self.y[k], self.u[k], self.e[k]
            )?;
            if let Some(eta) = &self.eta {
                write!(out, ",{:.16e}", eta[k])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Classical fourth-order Runge-Kutta integration with fixed step `h`.
///
/// The clamp is evaluated inside every stage. Signals are sampled at each
/// grid point `t_k = k h`, `k = 0..=round(t_end / h)`.
pub fn simulate(
    sys: &ClosedLoop,
    reference: &SignalSpec,
    disturbance: &SignalSpec,
    t_end: f64,
    h: f64,
) -> Result<SimTrace> {
    sys.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Invalid(format!("step must be positive, got {h}")));
    }
    if !(t_end.is_finite() && t_end >= h) {
        return Err(Error::Invalid(format!("horizon {t_end} must be at least one step ({h})")));
    }
    let steps = (t_end / h).round() as usize;
    let cap = steps + 1;
    let mut trace = SimTrace {
        t: Vec::with_capacity(cap),
        r: Vec::with_capacity(cap),
        w: Vec::with_capacity(cap),
        y: Vec::with_capacity(cap),
        u: Vec::with_capacity(cap),
        e: Vec::with_capacity(cap),
        eta: sys.eta_x.as_ref().map(|_| Vec::with_capacity(cap)),
        h,
        method: "rk4",
        final_state: Vec::new(),
    };
    let sig = |t: f64| (gen_signal(reference, t), gen_signal(disturbance, t));
    let mut x = sys.x0.clone();
    for k in 0..=steps {
        let t = k as f64 * h;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { time: t });
        }
        let (r, w) = sig(t);
        let y = (&sys.y_x * &x)[(0, 0)];
        let eta = sys.eta_x.as_ref().map(|e| (e * &x)[(0, 0)]);
        let e = match sys.error_tap {
            ErrorTap::ReferenceMinusOutput => r - y,
            ErrorTap::OutputMinusModel => y - eta.unwrap_or(0.0),
        };
        trace.t.push(t);
        trace.r.push(r);
        trace.w.push(w);
        trace.y.push(y);
        trace.u.push(sys.control(&x, r));
        trace.e.push(e);
        if let (Some(col), Some(v)) = (trace.eta.as_mut(), eta) {
            col.push(v);
        }
        if k == steps {
            break;
        }
        let (r1, w1) = (r, w);
        let (r2, w2) = sig(t + 0.5 * h);
        let (r4, w4) = sig(t + h);
        let k1 = sys.derivative(&x, r1, w1);
        let k2 = sys.derivative(&(&x + &k1 * (0.5 * h)), r2, w2);
        let k3 = sys.derivative(&(&x + &k2 * (0.5 * h)), r2, w2);
        let k4 = sys.derivative(&(&x + &k3 * h), r4, w4);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    let last = trace.t.last().copied().unwrap_or(0.0);
    let bad = trace.y.iter().chain(&trace.u).chain(&trace.e).any(|v| !v.is_finite());
    if bad {
        return Err(Error::Divergence { time: last });
    }
    trace.final_state = x.iter().copied().collect();
    Ok(trace)
}

/// Largest `|e|` over the trailing `window_fraction` of the horizon.
pub fn steady_state_error(trace: &SimTrace, window_fraction: f64) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::Invalid("empty trace".into()));
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::Invalid(format!("window fraction must lie in (0, 1], got {window_fraction}")));
    }
    let t_end = *trace.t.last().unwrap_or(&0.0);
    let from = t_end * (1.0 - window_fraction);
    Ok(trace
        .t
        .iter()
        .zip(&trace.e)
        .filter(|(t, _)| **t >= from - 1e-12 * t_end.max(1.0))
        .fold(0.0, |m, (_, e)| m.max(e.abs())))
}
