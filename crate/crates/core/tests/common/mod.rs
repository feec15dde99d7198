#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use servo_forge::exogenous::SignalModel;
use servo_forge::extended_estimator::{design_xest, XestController};
use servo_forge::internal_model::{design_im, ImController};
use servo_forge::lti::{LoopGain, RationalSiso, StateSpace};
use servo_forge::model_following::{design_mf, MfController};
use servo_forge::numlin::{column, row};
use servo_forge::{Complex, Matrix, Polynomial};

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// `1 / (s (s + 1))` in phase-variable form.
pub fn servo() -> StateSpace {
    StateSpace::strictly_proper(
        Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, -1.0]),
        column(&[0.0, 1.0]),
        row(&[1.0, 0.0]),
    )
    .unwrap()
}

pub fn perturbed_servo() -> StateSpace {
    servo().with_f_entry(1, 1, -1.1).unwrap()
}

pub fn im_sine_control() -> Vec<Complex> {
    vec![c(-1.0, 2.0), c(-1.0, -2.0), c(-1.7321, 1.0), c(-1.7321, -1.0)]
}

pub fn im_estimator() -> Vec<Complex> {
    vec![c(-5.0, 8.6603), c(-5.0, -8.6603)]
}

pub fn xest_control() -> Vec<Complex> {
    vec![c(-1.0, 1.7321), c(-1.0, -1.7321)]
}

pub fn xest_sine_estimator() -> Vec<Complex> {
    vec![c(-1.7321, 1.0), c(-1.7321, -1.0), c(-3.0, 5.1962), c(-3.0, -5.1962)]
}

pub fn oscillator() -> SignalModel {
    SignalModel::sine(1.0).unwrap()
}

pub fn im_sine() -> ImController {
    design_im(&servo(), &oscillator(), &im_sine_control(), &im_estimator()).unwrap()
}

pub fn xest_sine() -> XestController {
    design_xest(&servo(), &oscillator(), &xest_control(), &xest_sine_estimator()).unwrap()
}

pub fn mf_sine() -> MfController {
    design_mf(&servo(), &oscillator(), &xest_control()).unwrap()
}

pub fn rational(num: &[f64], den: &[f64]) -> LoopGain {
    LoopGain::rational(RationalSiso::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec())).unwrap())
}

/// `(s + 1) / s^2`.
pub fn example_one() -> LoopGain {
    rational(&[1.0, 1.0], &[0.0, 0.0, 1.0])
}

/// Two-channel Type 0 loop with open-loop poles at -1 and -2.
pub fn example_two() -> LoopGain {
    LoopGain::state_space(
        StateSpace::strictly_proper(
            Matrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]),
            Matrix::from_row_slice(2, 2, &[7.0, -8.0, -12.0, 14.0]),
            Matrix::from_row_slice(2, 2, &[7.0, 8.0, 6.0, 7.0]),
        )
        .unwrap(),
    )
    .unwrap()
}

/// Two-channel Type 1 loop with an unstable transmission zero.
pub fn example_three() -> LoopGain {
    LoopGain::state_space(
        StateSpace::strictly_proper(
            Matrix::from_row_slice(
                4,
                4,
                &[-1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -2.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            ),
            Matrix::from_row_slice(4, 2, &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 2.0, 4.0]),
            Matrix::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        )
        .unwrap(),
    )
    .unwrap()
}

/// Conjugate-closed set of `n` points with real parts in `re` and
/// imaginary parts of complex pairs in `(0, im_max]`.
pub fn random_spectrum(rng: &mut ChaCha8Rng, n: usize, re: (f64, f64), im_max: f64) -> Vec<Complex> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = rng.gen_range(re.0..re.1);
        if n - out.len() >= 2 && rng.gen_bool(0.5) {
            let y = rng.gen_range(0.1..im_max);
            out.push(c(x, y));
            out.push(c(x, -y));
        } else {
            out.push(c(x, 0.0));
        }
    }
    out
}

/// Scalar loop of order `n` (2..=5) and relative degree at least two whose
/// unity-feedback loop has the prescribed stable closed-loop poles.
///
/// Open-loop poles are drawn first, possibly unstable; the closed-loop
/// poles are then scaled so both sets share the same sum, which removes
/// the `s^(n-1)` term from `phi_cl - phi_ol`.
pub fn random_stable_loop(rng: &mut ChaCha8Rng) -> (LoopGain, Vec<Complex>, Vec<Complex>) {
    loop {
        let n = rng.gen_range(2..=5);
        let open = random_spectrum(rng, n, (-3.0, 1.0), 3.0);
        let open_sum: f64 = open.iter().map(|p| p.re).sum();
        if open_sum > -0.5 {
            continue;
        }
        let mut closed = random_spectrum(rng, n, (-4.0, -0.3), 3.0);
        let closed_sum: f64 = closed.iter().map(|p| p.re).sum();
        let k = open_sum / closed_sum;
        for p in &mut closed {
            p.re *= k;
        }
        if closed.iter().any(|p| p.re > -0.15) {
            continue;
        }
        let den = Polynomial::from_roots(&open);
        let phi = Polynomial::from_roots(&closed);
        let mut coeffs = (&phi - &den).coeffs().to_vec();
        coeffs.truncate(n - 1);
        let num = Polynomial::new(coeffs);
        if num.is_zero() || num.norm_inf() < 1e-6 {
            continue;
        }
        let Ok(tf) = RationalSiso::new(num, den) else { continue };
        if tf.order() != n {
            continue;
        }
        return (LoopGain::rational(tf), open, closed);
    }
}
