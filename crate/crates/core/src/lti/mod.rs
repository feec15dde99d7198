//! Linear time-invariant systems: realizations, transfer functions, poles,
//! zeros, frequency response and loop Type.

mod interpolation;
mod loopgain;
mod rational;
mod statespace;
mod zeros;

pub use interpolation::{check_interpolation, InterpolationPoint, PointKind};
pub use loopgain::{LoopGain, ReturnDifference, ORIGIN_TOLERANCE};
pub use rational::{RationalSiso, CANCEL_TOLERANCE};
pub use statespace::StateSpace;
pub use zeros::transmission_zeros;

use serde::Serialize;

use crate::numlin::{poly_roots, Complex, Polynomial};

/// `j omega` closer than this to a pole is rejected by frequency evaluation.
pub const POLE_TOLERANCE: f64 = 1e-9;

/// Root matching tolerance for internal-model detection.
pub const INTERNAL_MODEL_TOLERANCE: f64 = 1e-6;

/// Where the signal model `q(s)` lives in a loop, if anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InternalModel {
    /// `q` divides the controller denominator.
    Explicit,
    /// `q` divides the plant denominator only.
    Implicit,
    Absent,
}

/// Classifies whether `q` divides the controller or the plant denominator,
/// matching roots with multiplicity within [`INTERNAL_MODEL_TOLERANCE`].
pub fn verify_internal_model(controller_den: &Polynomial, plant_den: &Polynomial, q: &Polynomial) -> InternalModel {
    let Ok(q_roots) = poly_roots(q) else {
        return InternalModel::Absent;
    };
    let divides = |p: &Polynomial| match poly_roots(p) {
        Ok(roots) => contains_roots(&roots, &q_roots),
        Err(_) => false,
    };
    if divides(controller_den) {
        InternalModel::Explicit
    } else if divides(plant_den) {
        InternalModel::Implicit
    } else {
        InternalModel::Absent
    }
}

fn contains_roots(haystack: &[Complex], needles: &[Complex]) -> bool {
    let mut used = vec![false; haystack.len()];
    needles.iter().all(|r| {
        let hit = (0..haystack.len())
            .filter(|&j| !used[j])
            .find(|&j| (haystack[j] - r).norm() <= INTERNAL_MODEL_TOLERANCE * r.norm().max(1.0));
        if let Some(j) = hit {
            used[j] = true;
        }
        hit.is_some()
    })
}
