use thiserror::Error;

use crate::numlin::Complex;

/// Errors raised by the design, simulation and audit routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("matrix is singular to working precision (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("pair is not controllable: controllability matrix has rank {rank} < {order}")]
    Uncontrollable { rank: usize, order: usize },

    #[error("pair is not observable: observability matrix has rank {rank} < {order}")]
    Unobservable { rank: usize, order: usize },

    #[error("design infeasible: {0}")]
    Infeasible(String),

    #[error("system pencil is singular for every s")]
    DegenerateSystem,

    #[error("frequency {omega} rad/s lies within {distance:.3e} of a pole")]
    PoleProximity { omega: f64, distance: f64 },

    #[error("I + L(jw) is singular at w = {omega} rad/s (closed-loop pole on the imaginary axis)")]
    ClosedLoopPoleOnAxis { omega: f64 },

    #[error("closed loop is unstable; offending poles: {}", format_poles(.poles))]
    Unstable { poles: Vec<Complex> },

    #[error("simulation diverged at t = {time} s")]
    Divergence { time: f64 },

    #[error("unsupported system type: {0}")]
    UnsupportedType(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

fn format_poles(poles: &[Complex]) -> String {
    poles.iter().map(|p| format!("{:.6}{:+.6}i", p.re, p.im)).collect::<Vec<_>>().join(", ")
}
