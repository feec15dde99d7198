//! Pole/zero predictions of the sensitivity integrals.

use std::f64::consts::{FRAC_PI_2, PI};

use super::Value;
use crate::error::{Error, Result};
use crate::lti::ORIGIN_TOLERANCE;
use crate::numlin::Complex;

fn rhp(values: &[Complex]) -> impl Iterator<Item = &Complex> {
    values.iter().filter(|v| v.re > 0.0)
}

/// `(pi/2) sum(Re p_cl - Re p_ol) + pi sum_{Re p_ol > 0} Re p_ol`.
///
/// Real parts only, so conjugate pairs need no explicit pairing.
pub fn closed_form_sensitivity(open_poles: &[Complex], closed_poles: &[Complex]) -> Result<f64> {
    if open_poles.len() != closed_poles.len() {
        return Err(Error::Domain(format!(
            "{} open-loop poles against {} closed-loop poles",
            open_poles.len(),
            closed_poles.len()
        )));
    }
    let moved: f64 = closed_poles.iter().map(|p| p.re).sum::<f64>() - open_poles.iter().map(|p| p.re).sum::<f64>();
    let unstable: f64 = rhp(open_poles).map(|p| p.re).sum();
    Ok(FRAC_PI_2 * moved + PI * unstable)
}

/// Type 0 gives `Infinite`; otherwise
/// `(pi/2)(sum Re 1/p_cl - sum Re 1/z) + pi sum_{Re z > 0} Re 1/z`.
pub fn closed_form_complementary(closed_poles: &[Complex], zeros: &[Complex], system_type: usize) -> Result<Value> {
    if system_type == 0 {
        return Ok(Value::Infinite);
    }
    if let Some(z) = zeros.iter().find(|z| z.norm() < ORIGIN_TOLERANCE) {
        return Err(Error::Domain(format!("zero at the origin ({:.3e}{:+.3e}i)", z.re, z.im)));
    }
    if let Some(p) = closed_poles.iter().find(|p| p.norm() < ORIGIN_TOLERANCE) {
        return Err(Error::Domain(format!("closed-loop pole at the origin ({:.3e}{:+.3e}i)", p.re, p.im)));
    }
    let inv = |v: &Complex| v.inv().re;
    let poles: f64 = closed_poles.iter().map(inv).sum();
    let all_zeros: f64 = zeros.iter().map(inv).sum();
    let nmp: f64 = rhp(zeros).map(inv).sum();
    Ok(Value::Finite(FRAC_PI_2 * (poles - all_zeros) + PI * nmp))
}

/// Sensitivity integral written through the high-frequency coefficient:
/// `pi sum_{Re p > 0} Re p - pi k_h / 2`. `None` when `k_h` is infinite.
pub fn corollary_sensitivity(open_poles: &[Complex], k_h: Value) -> Option<f64> {
    let k_h = k_h.finite()?;
    Some(PI * rhp(open_poles).map(|p| p.re).sum::<f64>() - FRAC_PI_2 * k_h)
}

/// Complementary integral written through the velocity constant:
/// `-pi / (2 K_v) + pi sum_{Re z > 0} Re 1/z`. `None` for Type 0 loops.
pub fn corollary_complementary(zeros: &[Complex], k_v: Value) -> Option<f64> {
    let nmp = PI * rhp(zeros).map(|z| z.inv().re).sum::<f64>();
    match k_v {
        Value::Infinite => Some(nmp),
        Value::Finite(k) if k != 0.0 => Some(-PI / (2.0 * k) + nmp),
        Value::Finite(_) => None,
    }
}

/// `pi sum_{Re p > 0} ln|(conj(p) + z0) / (p - z0)|`.
pub fn nmp_closed_form(open_poles: &[Complex], z0: Complex) -> f64 {
    PI * rhp(open_poles).map(|p| ((p.conj() + z0) / (p - z0)).norm().ln()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn double_integrator_with_lead() {
        let s3 = 3f64.sqrt() / 2.0;
        let v = closed_form_sensitivity(&[c(0.0, 0.0), c(0.0, 0.0)], &[c(-0.5, s3), c(-0.5, -s3)]).unwrap();
        assert!((v + FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn stable_pair_moves_left() {
        let v = closed_form_sensitivity(&[c(-1.0, 0.0), c(-2.0, 0.0)], &[c(-2.0, 0.0), c(-4.0, 0.0)]).unwrap();
        assert!((v + 3.0 * FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn unmoved_poles_give_zero() {
        let p = [c(-1.0, 2.0), c(-1.0, -2.0)];
        assert_eq!(closed_form_sensitivity(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn unstable_pole_adds_its_real_part() {
        let v = closed_form_sensitivity(&[c(2.0, 0.0)], &[c(-1.0, 0.0)]).unwrap();
        assert!((v - (FRAC_PI_2 * -3.0 + PI * 2.0)).abs() < 1e-12);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        assert!(closed_form_sensitivity(&[c(0.0, 0.0)], &[]).is_err());
    }

    #[test]
    fn complementary_of_lead_loop_vanishes() {
        let s3 = 3f64.sqrt() / 2.0;
        let v = closed_form_complementary(&[c(-0.5, s3), c(-0.5, -s3)], &[c(-1.0, 0.0)], 2).unwrap();
        assert!(v.finite().unwrap().abs() < 1e-12);
    }

    #[test]
    fn type_zero_is_infinite() {
        assert_eq!(closed_form_complementary(&[c(-1.0, 0.0)], &[], 0).unwrap(), Value::Infinite);
    }

    #[test]
    fn origin_zero_is_rejected() {
        assert!(closed_form_complementary(&[c(-1.0, 0.0)], &[c(0.0, 0.0)], 1).is_err());
    }

    #[test]
    fn corollaries_of_lead_loop() {
        let open = [c(0.0, 0.0), c(0.0, 0.0)];
        assert!((corollary_sensitivity(&open, Value::Finite(1.0)).unwrap() + FRAC_PI_2).abs() < 1e-12);
        assert_eq!(corollary_sensitivity(&open, Value::Infinite), None);
        assert_eq!(corollary_complementary(&[c(-1.0, 0.0)], Value::Infinite), Some(0.0));
        assert_eq!(corollary_complementary(&[], Value::Finite(0.0)), None);
    }

    #[test]
    fn nmp_term_with_no_unstable_poles_is_zero() {
        assert_eq!(nmp_closed_form(&[c(-1.0, 0.0)], c(1.0, 0.0)), 0.0);
    }

    #[test]
    fn nmp_term_single_pole() {
        let v = nmp_closed_form(&[c(2.0, 0.0), c(-3.0, 0.0)], c(1.0, 0.0));
        assert!((v - PI * 3f64.ln()).abs() < 1e-12);
    }
}
