use proptest::prelude::*;
use servo_forge::numlin::{
    charpoly, eigenvalues, is_conjugate_closed, poly_roots, solve_linear, spectrum_distance, Polynomial,
};
use servo_forge::{Complex, Matrix};

fn square(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |v| Matrix::from_row_slice(n, n, &v))
    })
}

fn roots(max: usize) -> impl Strategy<Value = Vec<Complex>> {
    prop::collection::vec((-4.0f64..4.0, 0.0f64..3.0, any::<bool>()), 1..=max).prop_map(|parts| {
        let mut out = Vec::new();
        for (re, im, pair) in parts {
            if pair && im > 0.2 {
                out.push(Complex::new(re, im));
                out.push(Complex::new(re, -im));
            } else {
                out.push(Complex::new(re, 0.0));
            }
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_sum_to_trace(m in square(8)) {
        let e = eigenvalues(&m).unwrap();
        let sum: Complex = e.iter().sum();
        let scale = 1.0 + m.norm();
        prop_assert!((sum.re - m.trace()).abs() < 1e-8 * scale);
        prop_assert!(sum.im.abs() < 1e-8 * scale);
    }

    #[test]
    fn eigenvalues_multiply_to_determinant(m in square(5)) {
        let e = eigenvalues(&m).unwrap();
        let prod: Complex = e.iter().product();
        let det = m.determinant();
        let scale = (1.0 + m.norm()).powi(m.nrows() as i32);
        prop_assert!((prod.re - det).abs() < 1e-8 * scale, "{prod} vs {det}");
    }

    #[test]
    fn spectrum_is_conjugate_closed(m in square(8)) {
        let e = eigenvalues(&m).unwrap();
        prop_assert!(is_conjugate_closed(&e, 0.0));
    }

    #[test]
    fn similarity_recovers_diagonal(d in prop::collection::vec(-6.0f64..6.0, 2..6), q in prop::collection::vec(-1.0f64..1.0, 36)) {
        let n = d.len();
        let mut t = Matrix::from_fn(n, n, |i, j| q[i * 6 + j]);
        t += Matrix::identity(n, n) * 3.0;
        let m = &t * Matrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone())) * t.clone().try_inverse().unwrap();
        let want: Vec<Complex> = d.iter().map(|&x| Complex::new(x, 0.0)).collect();
        let spread = d.iter().enumerate().flat_map(|(i, a)| d[i + 1..].iter().map(move |b| (a - b).abs())).fold(f64::INFINITY, f64::min);
        prop_assume!(spread > 0.05);
        prop_assert!(spectrum_distance(&eigenvalues(&m).unwrap(), &want) < 1e-8);
    }

    #[test]
    fn polynomial_roots_round_trip(r in roots(6)) {
        let p = Polynomial::from_roots(&r);
        let got = poly_roots(&p).unwrap();
        let tol = 1e-6 * (1.0 + p.norm_inf());
        prop_assert!(spectrum_distance(&got, &r) < tol.max(1e-5), "{got:?} vs {r:?}");
    }

    #[test]
    fn charpoly_vanishes_on_eigenvalues(m in square(6)) {
        let p = charpoly(&m).unwrap();
        prop_assert!(p.is_monic());
        for z in eigenvalues(&m).unwrap() {
            let scale = (1.0 + m.norm()).powi(m.nrows() as i32);
            prop_assert!(p.eval_complex(z).norm() < 1e-7 * scale);
        }
    }

    #[test]
    fn division_reconstructs_dividend(a in prop::collection::vec(-3.0f64..3.0, 1..7), b in prop::collection::vec(-3.0f64..3.0, 1..4)) {
        let (pa, pb) = (Polynomial::new(a), Polynomial::new(b));
        prop_assume!(!pb.is_zero() && pb.leading().abs() > 0.1);
        let (q, r) = pa.div_rem(&pb).unwrap();
        let back = &(&q * &pb) + &r;
        let err = (&back - &pa).norm_inf();
        prop_assert!(err < 1e-9 * (1.0 + pa.norm_inf()) * (1.0 + q.norm_inf()));
        prop_assert!(r.degree().unwrap_or(0) < pb.degree().unwrap().max(1));
    }

    #[test]
    fn linear_solve_residual(m in square(6), b in prop::collection::vec(-5.0f64..5.0, 6)) {
        let n = m.nrows();
        let rhs = Matrix::from_column_slice(n, 1, &b[..n]);
        match solve_linear(&m, &rhs) {
            Ok(x) => prop_assert!((&m * &x - &rhs).norm() < 1e-8 * (1.0 + m.norm() * x.norm())),
            Err(servo_forge::Error::Singular { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

#[test]
fn companion_of_repeated_root() {
    let p = Polynomial::from_roots(&[Complex::new(-1.0, 0.0); 3]);
    let r = poly_roots(&p).unwrap();
    assert!(r.iter().all(|z| (z + 1.0).norm() < 1e-4));
}
