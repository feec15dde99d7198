//! Sensitivity and complementary sensitivity integral audits: quadrature
//! along the imaginary axis checked against pole/zero predictions.

mod closed_form;
mod numeric;
pub mod quadrature;

pub use closed_form::{
    closed_form_complementary, closed_form_sensitivity, corollary_complementary, corollary_sensitivity, nmp_closed_form,
};
pub use numeric::{
    numeric_complementary_integral, numeric_sensitivity_integral, require_stable, weighted_nmp_integral, MIN_FREQUENCY,
    PANELS_PER_DECADE, PANEL_TOLERANCE, ZERO_MATCH_TOLERANCE,
};

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::{LoopGain, ORIGIN_TOLERANCE};
use crate::numlin::{sort_spectrum, Complex};

/// A real number or positive infinity, kept apart from float overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Finite(f64),
    Infinite,
}

impl Value {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Self::Infinite
    }

    /// `|a - b|`; zero when both are infinite, infinite when only one is.
    pub fn distance(self, other: Self) -> Self {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite((a - b).abs()),
            (Self::Infinite, Self::Infinite) => Self::Finite(0.0),
            _ => Self::Infinite,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(*v),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Self::Finite(v)),
            Raw::Text(t) if t == "inf" => Ok(Self::Infinite),
            Raw::Text(t) => Err(de::Error::custom(format!("expected a number or \"inf\", got \"{t}\""))),
        }
    }
}

/// `k_h = lim s L(s)` as `s -> inf` and `K_v = lim s L(s)` as `s -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCoefficients {
    pub k_h: Value,
    pub k_v: Value,
}

/// Limit coefficients of a scalar loop from its polynomial coefficients.
pub fn limit_coefficients(l: &LoopGain) -> Result<LimitCoefficients> {
    if !l.is_siso() {
        return Err(Error::Domain("limit coefficients are defined for scalar loops".into()));
    }
    let tf = l.to_rational()?;
    let (num, den) = (tf.num(), tf.den());
    let k_h = match tf.relative_degree() {
        None => Value::Finite(0.0),
        Some(r) if r < 0 => return Err(Error::Domain("improper loop gain".into())),
        Some(0) => Value::Infinite,
        Some(1) => Value::Finite(num.leading() / den.leading()),
        Some(_) => Value::Finite(0.0),
    };
    let poles = tf.poles()?;
    let k_v = match poles.iter().filter(|p| p.norm() < ORIGIN_TOLERANCE).count() {
        0 => Value::Finite(0.0),
        1 => Value::Finite(num.coeff(0) / den.coeff(1)),
        _ => Value::Infinite,
    };
    Ok(LimitCoefficients { k_h, k_v })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegralKind {
    Sensitivity,
    Complementary,
}

/// Open-loop stable or unstable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "OLS")]
    Stable,
    #[serde(rename = "OLU")]
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub integral: IntegralKind,
    pub numeric: Value,
    pub closed_form: Value,
    pub residual: Value,
    pub classification: Classification,
    #[serde(rename = "type")]
    pub system_type: usize,
    #[serde(serialize_with = "complex_pairs")]
    pub open_poles: Vec<Complex>,
    #[serde(serialize_with = "complex_pairs")]
    pub closed_poles: Vec<Complex>,
    #[serde(serialize_with = "complex_pairs")]
    pub zeros: Vec<Complex>,
    pub n_p: usize,
    pub n_z: usize,
    /// Disagreement between the closed form and its corollary restatement
    /// (scalar loops only).
    pub corollary_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NmpReport {
    pub integral: &'static str,
    #[serde(serialize_with = "complex_pair")]
    pub z0: Complex,
    pub numeric: f64,
    pub closed_form: f64,
    pub residual: f64,
    #[serde(serialize_with = "complex_pairs")]
    pub unstable_poles: Vec<Complex>,
}

fn complex_pair<S: Serializer>(z: &Complex, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn complex_pairs<S: Serializer>(v: &[Complex], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// Pole/zero data shared by both reports.
struct LoopData {
    open: Vec<Complex>,
    closed: Vec<Complex>,
    zeros: Vec<Complex>,
    system_type: usize,
    limits: Option<LimitCoefficients>,
}

impl LoopData {
    fn collect(l: &LoopGain) -> Result<Self> {
        let closed = require_stable(l)?;
        let mut open = l.poles()?;
        let mut zeros = l.zeros()?;
        sort_spectrum(&mut open);
        sort_spectrum(&mut zeros);
        let system_type = l.system_type()?;
        let limits = if l.is_siso() { Some(limit_coefficients(l)?) } else { None };
        Ok(Self { open, closed, zeros, system_type, limits })
    }

    fn report(
        &self,
        integral: IntegralKind,
        numeric: Value,
        closed_form: Value,
        corollary: Option<f64>,
    ) -> SensitivityReport {
        let n_p = self.open.iter().filter(|p| p.re > 0.0).count();
        SensitivityReport {
            integral,
            numeric,
            closed_form,
            residual: numeric.distance(closed_form),
            classification: if n_p > 0 { Classification::Unstable } else { Classification::Stable },
            system_type: self.system_type,
            open_poles: self.open.clone(),
            closed_poles: self.closed.clone(),
            zeros: self.zeros.clone(),
            n_p,
            n_z: self.zeros.iter().filter(|z| z.re > 0.0).count(),
            corollary_residual: corollary,
        }
    }

    fn sensitivity(&self, l: &LoopGain) -> Result<SensitivityReport> {
        let numeric = numeric_sensitivity_integral(l)?;
        let closed_form = closed_form_sensitivity(&self.open, &self.closed)?;
        let corollary =
            self.limits.and_then(|lim| corollary_sensitivity(&self.open, lim.k_h)).map(|c| (c - closed_form).abs());
        Ok(self.report(IntegralKind::Sensitivity, Value::Finite(numeric), Value::Finite(closed_form), corollary))
    }

    fn complementary(&self, l: &LoopGain) -> Result<SensitivityReport> {
        let numeric = numeric_complementary_integral(l)?;
        let closed_form = closed_form_complementary(&self.closed, &self.zeros, self.system_type)?;
        let corollary = match (self.limits, closed_form) {
            (Some(lim), Value::Finite(cf)) => corollary_complementary(&self.zeros, lim.k_v).map(|c| (c - cf).abs()),
            _ => None,
        };
        Ok(self.report(IntegralKind::Complementary, numeric, closed_form, corollary))
    }
}

/// Sensitivity integral report.
pub fn audit_sensitivity(l: &LoopGain) -> Result<SensitivityReport> {
    LoopData::collect(l)?.sensitivity(l)
}

/// Complementary sensitivity integral report.
pub fn audit_complementary(l: &LoopGain) -> Result<SensitivityReport> {
    LoopData::collect(l)?.complementary(l)
}

/// Both reports, sharing one pole/zero computation.
pub fn audit(l: &LoopGain) -> Result<(SensitivityReport, SensitivityReport)> {
    let data = LoopData::collect(l)?;
    Ok((data.sensitivity(l)?, data.complementary(l)?))
}

/// Weighted integral report at the unstable zero `z0`.
pub fn audit_nmp(l: &LoopGain, z0: Complex) -> Result<NmpReport> {
    let (numeric, closed_form) = weighted_nmp_integral(l, z0)?;
    let mut unstable_poles: Vec<Complex> = l.poles()?.into_iter().filter(|p| p.re > 0.0).collect();
    sort_spectrum(&mut unstable_poles);
    Ok(NmpReport { integral: "nmp", z0, numeric, closed_form, residual: (numeric - closed_form).abs(), unstable_poles })
}
