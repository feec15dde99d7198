//! Argument value parsers: pole lists, coefficient lists, perturbations.

use std::str::FromStr;

use servo_forge::numlin::is_conjugate_closed;
use servo_forge::placement::CONJUGATE_TOLERANCE;
use servo_forge::{Complex, Polynomial};

/// Single complex number in `a+bi`, `a-bi`, `a`, or `bi` form.
pub fn complex(text: &str) -> Result<Complex, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty value".into());
    }
    Complex::from_str(&t).map_err(|_| format!("`{text}` is not a number of the form a+bi"))
}

/// Comma-separated complex values that must form a conjugate-closed set.
pub fn pole_list(text: &str) -> Result<Vec<Complex>, String> {
    let poles = text.split(',').map(complex).collect::<Result<Vec<_>, _>>()?;
    if poles.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
        return Err(format!("pole list `{text}` has a non-finite entry"));
    }
    if !is_conjugate_closed(&poles, CONJUGATE_TOLERANCE) {
        return Err(format!("pole list `{text}` is not closed under conjugation"));
    }
    Ok(poles)
}

/// Parsed `--control-poles` / `--estimator-poles` value.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleList(pub Vec<Complex>);

impl FromStr for PoleList {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        pole_list(text).map(PoleList)
    }
}

/// Signal model from the non-leading coefficients of a monic `d`, highest
/// power first: `0,1` is `p^2 + 1`, `0` is `p`, `0,1,0` is `p^3 + p`.
pub fn monic_tail(text: &str) -> Result<Polynomial, String> {
    let tail = text
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    if tail.iter().any(|v| !v.is_finite()) {
        return Err("coefficients must be finite".into());
    }
    let mut ascending: Vec<f64> = tail.into_iter().rev().collect();
    ascending.push(1.0);
    Ok(Polynomial::new(ascending))
}

/// Which plant matrix an override addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    F,
    G,
    H,
}

/// Entry override `matrix:row,col:value` with 0-based indices, so
/// `f:1,1:-1.1` sets the second diagonal entry of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub target: Target,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl FromStr for Perturbation {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let bad = || format!("perturbation `{text}` must look like f:1,1:-1.1");
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [m, idx, v] = parts[..] else { return Err(bad()) };
        let target = match m.to_ascii_lowercase().as_str() {
            "f" => Target::F,
            "g" => Target::G,
            "h" => Target::H,
            _ => return Err(format!("perturbation `{text}`: unknown matrix `{m}` (f, g, h)")),
        };
        let (i, j) = idx.split_once(',').ok_or_else(bad)?;
        let index = |s: &str| {
            s.trim().parse::<usize>().map_err(|_| format!("perturbation `{text}`: indices are 0-based integers"))
        };
        let value: f64 = v.parse().map_err(|_| bad())?;
        if !value.is_finite() {
            return Err(format!("perturbation `{text}`: value must be finite"));
        }
        Ok(Self { target, row: index(i)?, col: index(j)?, value })
    }
}
