//! One-dimensional quadrature used by the integral audits.

const MAX_DEPTH: u32 = 48;
/// Levels of Simpson bisection taken before the error test is trusted.
const MIN_DEPTH: u32 = 3;

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (nonnegative half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Adaptive Simpson rule with Richardson correction; `tol` is absolute.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let settled = MAX_DEPTH - depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol;
    if depth == 0 || settled || !delta.is_finite() {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Single G7K15 evaluation: `(kronrod, |kronrod - gauss|)`.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive bisection on G7K15. The nodes are interior, so integrable
/// endpoint singularities are handled.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    gk_step(f, a, b, tol, MAX_DEPTH)
}

// The tolerance shrinks by sqrt(2) per level: the error on a panel holding a
// logarithmic endpoint singularity only halves with each bisection.
fn gk_step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (val, err) = gauss_kronrod_15(f, a, b);
    let narrow = (b - a) <= 1e3 * f64::EPSILON * a.abs().max(b.abs());
    if depth == 0 || narrow || err <= tol || !err.is_finite() {
        return val;
    }
    let m = 0.5 * (a + b);
    let sub = tol * std::f64::consts::FRAC_1_SQRT_2;
    gk_step(f, a, m, sub, depth - 1) + gk_step(f, m, b, sub, depth - 1)
}

/// Breakpoints `lo = w_0 < ... < w_k = hi`, `per_decade` per decade of
/// frequency, merged with `extra` points that fall strictly inside.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize, extra: &[f64]) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let count = ((decades * per_decade as f64).ceil() as usize).max(1);
    let mut pts: Vec<f64> = (0..=count).map(|k| lo * 10f64.powf(decades * k as f64 / count as f64)).collect();
    pts[count] = hi;
    pts.extend(extra.iter().copied().filter(|&w| w > lo && w < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12);
        assert!((v - 0.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_on_smooth_function() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-10);
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn kronrod_handles_log_endpoint() {
        let v = adaptive_gauss_kronrod(&|x: f64| x.ln(), 0.0, 1.0, 1e-10);
        assert!((v + 1.0).abs() < 1e-8);
    }

    #[test]
    fn kronrod_is_exact_on_polynomials() {
        let (v, err) = gauss_kronrod_15(&|x: f64| x.powi(10), -1.0, 1.0);
        assert!((v - 2.0 / 11.0).abs() < 1e-14);
        assert!(err < 1e-12);
    }

    #[test]
    fn grid_covers_range_and_merges_extras() {
        let g = log_grid(1e-4, 1e4, 8, &[1.0, 3.0, 1e5]);
        assert_eq!(g[0], 1e-4);
        assert_eq!(*g.last().unwrap(), 1e4);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.contains(&3.0));
        assert_eq!(g.iter().filter(|&&w| (w - 1.0).abs() < 1e-6).count(), 1);
    }
}
