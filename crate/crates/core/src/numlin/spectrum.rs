use super::Complex;

/// Sorts lexicographically by `(re, im)`.
pub fn sort_spectrum(values: &mut [Complex]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Pairs each value in the upper half-plane with its nearest unmatched
/// partner in the lower half-plane and makes the pair exactly conjugate.
pub fn symmetrize_conjugates(values: &mut [Complex]) {
    let n = values.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || values[i].im <= 0.0 {
            continue;
        }
        let target = values[i].conj();
        let partner = (0..n)
            .filter(|&j| j != i && !used[j] && values[j].im < 0.0)
            .min_by(|&a, &b| (values[a] - target).norm().total_cmp(&(values[b] - target).norm()));
        if let Some(j) = partner {
            let re = 0.5 * (values[i].re + values[j].re);
            let im = 0.5 * (values[i].im - values[j].im);
            values[i] = Complex::new(re, im);
            values[j] = Complex::new(re, -im);
            used[i] = true;
            used[j] = true;
        }
    }
}

/// True when every value has a conjugate partner within `tol`; real values
/// (|im| <= tol) are their own partner.
pub fn is_conjugate_closed(values: &[Complex], tol: f64) -> bool {
    let n = values.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        if values[i].im.abs() <= tol {
            used[i] = true;
            continue;
        }
        let target = values[i].conj();
        let partner = (0..n).find(|&j| j != i && !used[j] && (values[j] - target).norm() <= tol);
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => return false,
        }
    }
    true
}

/// Largest distance from any value in `want` to its greedily matched
/// counterpart in `got`; infinite when the lengths differ.
///
/// Matching is one-to-one so repeated values are compared with
/// multiplicity.
pub fn spectrum_distance(got: &[Complex], want: &[Complex]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; got.len()];
    let mut worst: f64 = 0.0;
    for w in want {
        let best =
            (0..got.len()).filter(|&j| !used[j]).min_by(|&a, &b| (got[a] - w).norm().total_cmp(&(got[b] - w).norm()));
        match best {
            Some(j) => {
                used[j] = true;
                worst = worst.max((got[j] - w).norm());
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrize_averages_pairs() {
        let mut v = vec![Complex::new(-1.0, 2.0 + 1e-14), Complex::new(-1.0 + 2e-14, -2.0)];
        symmetrize_conjugates(&mut v);
        assert_eq!(v[0], v[1].conj());
    }

    #[test]
    fn closure_check() {
        let closed = [Complex::new(-1.0, 1.0), Complex::new(-2.0, 0.0), Complex::new(-1.0, -1.0)];
        assert!(is_conjugate_closed(&closed, 1e-9));
        let open = [Complex::new(-1.0, 1.0), Complex::new(-1.0, -1.1)];
        assert!(!is_conjugate_closed(&open, 1e-9));
    }

    #[test]
    fn distance_respects_multiplicity() {
        let a = [Complex::new(-1.0, 0.0), Complex::new(-1.0, 0.0)];
        let b = [Complex::new(-1.0, 0.0), Complex::new(-2.0, 0.0)];
        assert_eq!(spectrum_distance(&a, &b), 1.0);
        assert_eq!(spectrum_distance(&a, &a), 0.0);
        assert!(spectrum_distance(&a, &b[..1]).is_infinite());
    }
}
