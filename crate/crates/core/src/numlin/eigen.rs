#![allow(clippy::needless_range_loop)]

use super::{sort_spectrum, symmetrize_conjugates, Complex, Matrix, Polynomial};
use crate::error::{Error, Result};

const RADIX: f64 = 2.0;

/// All eigenvalues of a real square matrix, with multiplicity.
///
/// The matrix is balanced, reduced to upper Hessenberg form with Householder
/// reflections and then deflated with Francis double-shift QR sweeps. The
/// result is conjugate-paired and sorted by `(re, im)`.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Complex>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("eigenvalues need a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    super::ensure_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = to_rows(m);
    balance(&mut h);
    hessenberg(&mut h);
    let mut eig = hqr(&mut h)?;
    symmetrize_conjugates(&mut eig);
    sort_spectrum(&mut eig);
    Ok(eig)
}

/// Characteristic polynomial `det(sI - m)`.
///
/// Computed from the Hessenberg form by the determinant recurrence, which
/// keeps repeated eigenvalues accurate where expanding computed roots
/// would not.
pub fn charpoly(m: &Matrix) -> Result<Polynomial> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "characteristic polynomial needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    super::ensure_finite(m)?;
    let n = m.nrows();
    let mut h = to_rows(m);
    hessenberg(&mut h);
    let mut p: Vec<Polynomial> = Vec::with_capacity(n + 1);
    p.push(Polynomial::one());
    for k in 1..=n {
        let shift = Polynomial::new(vec![-h[k - 1][k - 1], 1.0]);
        let mut pk = &shift * &p[k - 1];
        let mut prod = 1.0;
        for i in (1..k).rev() {
            prod *= h[i][i - 1];
            if prod == 0.0 {
                break;
            }
            pk = &pk - &p[i - 1].scale(h[i - 1][k - 1] * prod);
        }
        p.push(pk);
    }
    Ok(p.pop().unwrap_or_else(Polynomial::one))
}

fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable; exact in floating point.
fn balance(a: &mut [Vec<f64>]) {
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for v in a[i].iter_mut() {
                    *v *= g;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form; entries below the first
/// subdiagonal are set to exact zeros.
fn hessenberg(h: &mut [Vec<f64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let f = (m..=high).rev().map(|i| ort[i] * h[i][j]).sum::<f64>() / hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for row in h.iter_mut() {
            let f = (m..=high).rev().map(|j| ort[j] * row[j]).sum::<f64>() / hh;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        h[m][m - 1] = scale * g;
    }
    for (i, row) in h.iter_mut().enumerate() {
        for v in row.iter_mut().take(i.saturating_sub(1)) {
            *v = 0.0;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
fn hqr(h: &mut [Vec<f64>]) -> Result<Vec<Complex>> {
    let nn = h.len();
    let eps = f64::EPSILON;
    let cap = 100 * nn;
    let mut wr = vec![0.0; nn];
    let mut wi = vec![0.0; nn];

    let mut norm = 0.0;
    for (i, row) in h.iter().enumerate() {
        for v in &row[i.saturating_sub(1)..] {
            norm += v.abs();
        }
    }
    if norm == 0.0 {
        return Ok(vec![Complex::new(0.0, 0.0); nn]);
    }

    let mut n = nn as isize - 1;
    let mut exshift = 0.0;
    let mut iter = 0usize;
    let mut total = 0usize;
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut x, mut y, mut w);

    while n >= 0 {
        let nu = n as usize;
        let mut l = nu;
        while l > 0 {
            s = h[l - 1][l - 1].abs() + h[l][l].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[l][l - 1].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            h[nu][nu] += exshift;
            wr[nu] = h[nu][nu];
            wi[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = h[nu][nu - 1] * h[nu - 1][nu];
            p = (h[nu - 1][nu - 1] - h[nu][nu]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[nu][nu] += exshift;
            h[nu - 1][nu - 1] += exshift;
            x = h[nu][nu];
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                wr[nu - 1] = x + z;
                wr[nu] = if z != 0.0 { x - w / z } else { wr[nu - 1] };
                wi[nu - 1] = 0.0;
                wi[nu] = 0.0;
            } else {
                wr[nu - 1] = x + p;
                wr[nu] = x + p;
                wi[nu - 1] = z;
                wi[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            if total >= cap {
                return Err(Error::Numerical(format!("QR iteration did not converge within {cap} sweeps")));
            }
            x = h[nu][nu];
            y = h[nu - 1][nu - 1];
            w = h[nu][nu - 1] * h[nu - 1][nu];

            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[i][i] -= x;
                }
                s = h[nu][nu - 1].abs() + h[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[i][i] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total += 1;

            let mut m = nu - 2;
            loop {
                z = h[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[m + 1][m] + h[m][m + 1];
                q = h[m + 1][m + 1] - z - r - s;
                r = h[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let lhs = h[m][m - 1].abs() * (q.abs() + r.abs());
                let rhs = eps * (p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs()));
                if lhs < rhs {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[i][i - 2] = 0.0;
                if i > m + 2 {
                    h[i][i - 3] = 0.0;
                }
            }

            let mut k = m;
            while k < nu {
                let notlast = k != nu - 1;
                let mut skip = false;
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if notlast { h[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        skip = true;
                    } else {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                if !skip {
                    s = (p * p + q * q + r * r).sqrt();
                    if p < 0.0 {
                        s = -s;
                    }
                    if s != 0.0 {
                        if k != m {
                            h[k][k - 1] = -s * x;
                        } else if l != m {
                            h[k][k - 1] = -h[k][k - 1];
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for j in k..nn {
                            p = h[k][j] + q * h[k + 1][j];
                            if notlast {
                                p += r * h[k + 2][j];
                                h[k + 2][j] -= p * z;
                            }
                            h[k][j] -= p * x;
                            h[k + 1][j] -= p * y;
                        }
                        for row in h.iter_mut().take(nu.min(k + 3) + 1) {
                            p = x * row[k] + y * row[k + 1];
                            if notlast {
                                p += z * row[k + 2];
                                row[k + 2] -= p * r;
                            }
                            row[k] -= p;
                            row[k + 1] -= p * q;
                        }
                    }
                }
                k += 1;
            }
        }
    }

    let out: Vec<Complex> = wr.iter().zip(&wi).map(|(&re, &im)| Complex::new(re, im)).collect();
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("QR iteration produced non-finite eigenvalues".into()));
    }
    Ok(out)
}
