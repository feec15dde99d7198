//! Quadrature of the sensitivity integrals along the imaginary axis.

use std::f64::consts::FRAC_PI_2;

use super::closed_form::nmp_closed_form;
use super::quadrature::{adaptive_gauss_kronrod, adaptive_simpson, log_grid};
use super::Value;
use crate::error::{Error, Result};
use crate::lti::{LoopGain, ReturnDifference, ORIGIN_TOLERANCE};
use crate::numlin::{sort_spectrum, Complex};

/// Lower end of the logarithmic frequency grid.
pub const MIN_FREQUENCY: f64 = 1e-4;
/// Absolute tolerance handed to each quadrature panel.
pub const PANEL_TOLERANCE: f64 = 1e-4;
pub const PANELS_PER_DECADE: usize = 8;
/// Distance within which an unstable zero must match the requested `z0`.
pub const ZERO_MATCH_TOLERANCE: f64 = 1e-6;

const AXIS_TOLERANCE: f64 = 1e-9;
const TAIL_SAMPLES: usize = 33;
const TAIL_FIT_LIMIT: f64 = 0.05;
const NEGLIGIBLE_TAIL: f64 = 1e-7;
const MAX_WIDENINGS: usize = 3;
const NMP_RANGE: f64 = 1e4;
const NMP_PANELS: usize = 64;

/// Closed-loop poles of `l`, or `Unstable` listing those with `Re >= 0`.
pub fn require_stable(l: &LoopGain) -> Result<Vec<Complex>> {
    let mut closed = l.closed_loop_poles()?;
    sort_spectrum(&mut closed);
    let bad: Vec<Complex> = closed.iter().copied().filter(|p| p.re >= 0.0).collect();
    if bad.is_empty() {
        Ok(closed)
    } else {
        Err(Error::Unstable { poles: bad })
    }
}

/// `Omega = max(1e4, 1e3 max |p|)` over the supplied poles.
fn upper_frequency(poles: &[Complex]) -> f64 {
    let largest = poles.iter().map(|p| p.norm()).fold(0.0, f64::max);
    (1e3 * largest).max(1e4)
}

fn on_axis(v: &Complex) -> bool {
    v.re.abs() <= AXIS_TOLERANCE * v.norm().max(1.0)
}

/// Nonnegative frequencies of the points lying on the imaginary axis.
fn axis_frequencies(values: &[Complex]) -> Vec<f64> {
    values.iter().filter(|v| on_axis(v)).map(|v| v.im.abs()).collect()
}

/// Frequencies of lightly damped points, used as extra breakpoints so
/// narrow resonance peaks are not stepped over.
fn resonances(values: &[Complex]) -> Vec<f64> {
    values.iter().filter(|v| v.im != 0.0 && v.re.abs() < 0.5 * v.norm()).map(|v| v.im.abs()).collect()
}

/// Panelwise integral over the breakpoints `grid`. Panels touching a
/// singular frequency use Gauss-Kronrod, whose nodes avoid the endpoints.
fn integrate_grid<F: Fn(f64) -> f64>(g: &F, grid: &[f64], singular: &[f64]) -> f64 {
    let near = |w: f64| singular.iter().any(|&s| (w - s).abs() <= 1e-9 * s.max(1e-12));
    grid.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if near(a) || near(b) {
                adaptive_gauss_kronrod(g, a, b, PANEL_TOLERANCE)
            } else {
                adaptive_simpson(g, a, b, PANEL_TOLERANCE)
            }
        })
        .sum()
}

fn body<F: Fn(f64) -> f64>(g: &F, lo: f64, hi: f64, singular: &[f64], extra: &[f64]) -> f64 {
    let mut breaks = singular.to_vec();
    breaks.extend_from_slice(extra);
    let grid = log_grid(lo, hi, PANELS_PER_DECADE, &breaks);
    integrate_grid(g, &grid, singular)
}

fn tail_samples(omega: f64) -> impl Iterator<Item = f64> {
    (0..TAIL_SAMPLES).map(move |k| omega * 10f64.powf(k as f64 / (TAIL_SAMPLES - 1) as f64 - 1.0))
}

/// Least-squares `c / w^2` over the last decade: `(c / Omega, relative residual)`.
fn sensitivity_tail<F: Fn(f64) -> f64>(g: &F, omega: f64) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = tail_samples(omega).map(|w| (w.powi(-2), g(w))).collect();
    let c = pts.iter().map(|(x, y)| x * y).sum::<f64>() / pts.iter().map(|(x, _)| x * x).sum::<f64>();
    let scale = pts.iter().map(|(_, y)| y * y).sum::<f64>().sqrt();
    let resid = pts.iter().map(|(x, y)| (y - c * x).powi(2)).sum::<f64>().sqrt();
    (c / omega, if scale > 0.0 { resid / scale } else { 0.0 })
}

/// Least-squares `(a + b ln w) / w^2` over the last decade, integrated to
/// infinity: `a / Omega + b (ln Omega + 1) / Omega`.
fn complementary_tail<F: Fn(f64) -> f64>(ln_t: &F, omega: f64) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = tail_samples(omega).map(|w| (w.ln(), ln_t(w))).collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let scale = pts.iter().map(|(_, y)| y * y).sum::<f64>().sqrt();
    let resid = pts.iter().map(|(x, y)| (y - a - b * x).powi(2)).sum::<f64>().sqrt();
    let tail = a / omega + b * (omega.ln() + 1.0) / omega;
    (tail, if scale > 0.0 { resid / scale } else { 0.0 })
}

/// Integrates `[lo, Omega]` and closes the tail, widening `Omega` by a
/// decade while the asymptotic fit is poor and the tail still matters.
fn body_with_tail<F, T>(g: &F, lo: f64, mut omega: f64, singular: &[f64], extra: &[f64], tail: T) -> f64
where
    F: Fn(f64) -> f64,
    T: Fn(f64) -> (f64, f64),
{
    let mut total = body(g, lo, omega, singular, extra);
    for attempt in 0..=MAX_WIDENINGS {
        let (value, resid) = tail(omega);
        if resid <= TAIL_FIT_LIMIT || value.abs() < NEGLIGIBLE_TAIL || attempt == MAX_WIDENINGS {
            return total + value;
        }
        log::warn!(
            "tail fit residual {resid:.3} above {TAIL_FIT_LIMIT} at {omega:.3e} rad/s; extending the range a decade"
        );
        total += body(g, omega, 10.0 * omega, singular, extra);
        omega *= 10.0;
    }
    total
}

fn strictly_proper(l: &LoopGain) -> Result<()> {
    if l.is_strictly_proper() {
        Ok(())
    } else {
        Err(Error::Domain("sensitivity integral needs a strictly proper loop gain".into()))
    }
}

/// `integral_0^inf ln|det S(j w)| dw`.
pub fn numeric_sensitivity_integral(l: &LoopGain) -> Result<f64> {
    strictly_proper(l)?;
    let closed = require_stable(l)?;
    let open = l.poles()?;
    let rd = l.return_difference()?;
    Ok(sensitivity_quadrature(&rd, &open, &closed))
}

fn sensitivity_quadrature(rd: &ReturnDifference, open: &[Complex], closed: &[Complex]) -> f64 {
    let g = |w: f64| rd.ln_abs_det_s(Complex::new(0.0, w));
    let singular: Vec<f64> = axis_frequencies(open).into_iter().filter(|&w| w > 0.0).collect();
    let mut extra = resonances(open);
    extra.extend(resonances(closed));
    let mut all = open.to_vec();
    all.extend_from_slice(closed);
    let omega = upper_frequency(&all);
    let w0 = MIN_FREQUENCY;
    let head = if open.iter().any(|p| p.norm() < ORIGIN_TOLERANCE) {
        let (g1, g2) = (g(w0), g(0.5 * w0));
        let beta = (g1 - g2) / std::f64::consts::LN_2;
        let alpha = g1 - beta * w0.ln();
        w0 * (alpha + beta * (w0.ln() - 1.0))
    } else {
        adaptive_gauss_kronrod(&g, 0.0, w0, PANEL_TOLERANCE)
    };
    head + body_with_tail(&g, w0, omega, &singular, &extra, |om| sensitivity_tail(&g, om))
}

/// `integral_0^inf ln|det T(j w)| / w^2 dw`; `Infinite` for Type 0 loops.
pub fn numeric_complementary_integral(l: &LoopGain) -> Result<Value> {
    let closed = require_stable(l)?;
    if l.system_type()? == 0 {
        return Ok(Value::Infinite);
    }
    let open = l.poles()?;
    let zeros = l.zeros()?;
    let rd = l.return_difference()?;
    Ok(Value::Finite(complementary_quadrature(&rd, &open, &closed, &zeros)))
}

fn complementary_quadrature(rd: &ReturnDifference, open: &[Complex], closed: &[Complex], zeros: &[Complex]) -> f64 {
    let ln_t = |w: f64| rd.ln_abs_det_t(Complex::new(0.0, w));
    let g = |w: f64| ln_t(w) / (w * w);
    let singular: Vec<f64> = axis_frequencies(zeros).into_iter().filter(|&w| w > 0.0).collect();
    let mut extra = resonances(zeros);
    extra.extend(resonances(closed));
    let mut all = open.to_vec();
    all.extend_from_slice(closed);
    let omega = upper_frequency(&all);
    let w0 = MIN_FREQUENCY;
    // Quadratic through w0, 2 w0, 3 w0 integrated over [0, w0].
    let head = w0 * (23.0 * g(w0) - 16.0 * g(2.0 * w0) + 5.0 * g(3.0 * w0)) / 12.0;
    head + body_with_tail(&g, w0, omega, &singular, &extra, |om| complementary_tail(&ln_t, om))
}

/// Weighted integral `integral ln|S(j w)| W(z0, w) dw` over the whole axis,
/// with `W = s0 / (s0^2 + (w - w0)^2)` and `z0 = s0 + j w0` an unstable
/// zero of the loop. Returns `(numeric, closed_form)`.
pub fn weighted_nmp_integral(l: &LoopGain, z0: Complex) -> Result<(f64, f64)> {
    if !l.is_siso() {
        return Err(Error::Domain("weighted integral is implemented for scalar loops".into()));
    }
    strictly_proper(l)?;
    if z0.re.is_nan() || z0.re <= 0.0 {
        return Err(Error::Domain(format!("z0 = {}{:+}i is not in the open right half-plane", z0.re, z0.im)));
    }
    let zeros = l.zeros()?;
    if !zeros.iter().any(|z| z.re > 0.0 && (z - z0).norm() <= ZERO_MATCH_TOLERANCE) {
        return Err(Error::Domain(format!(
            "z0 = {}{:+}i is not an open right-half-plane zero of the loop",
            z0.re, z0.im
        )));
    }
    let closed = require_stable(l)?;
    let open = l.poles()?;
    let rd = l.return_difference()?;
    let (s0, w0) = (z0.re, z0.im);
    let omega_of = |theta: f64| w0 + s0 * theta.tan();
    let theta_of = |w: f64| ((w - w0) / s0).atan();
    let g = |theta: f64| rd.ln_abs_det_s(Complex::new(0.0, omega_of(theta)));
    let reach = NMP_RANGE * z0.norm();
    let (lo, hi) = (theta_of(-reach), theta_of(reach));
    let mut axis = axis_frequencies(&open);
    axis.extend(resonances(&open));
    axis.extend(resonances(&closed));
    let mut breaks: Vec<f64> = (0..=NMP_PANELS).map(|k| lo + (hi - lo) * k as f64 / NMP_PANELS as f64).collect();
    breaks
        .extend(axis.iter().flat_map(|&w| [w, -w]).map(theta_of).filter(|&t| t > lo && t < hi && t.abs() < FRAC_PI_2));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let numeric = breaks.windows(2).map(|w| adaptive_gauss_kronrod(&g, w[0], w[1], PANEL_TOLERANCE * 1e-2)).sum();
    Ok((numeric, nmp_closed_form(&open, z0)))
}
