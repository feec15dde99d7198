//! Robust tracking and regulation workbench for linear time-invariant plants.
//!
//! The crate covers three controller synthesis routes for single-input
//! single-output plants:
//!
//! * [`internal_model`]: a copy of the exogenous signal dynamics `d(p)` is
//!   placed in the loop as an explicit compensator `c(s)/d(s)`.
//! * [`extended_estimator`]: an observer is augmented with the signal
//!   generator and its estimate is fed forward to cancel the equivalent input.
//! * [`model_following`]: the open-loop (non-robust) scheme
//!   `u = N z - K (x - M z)`.
//!
//! Closed loops are simulated with a fixed-step integrator under input
//! saturation ([`sim`]), and any loop gain can be audited against the Bode
//! sensitivity and complementary sensitivity integral constraints, both by
//! quadrature and from pole/zero locations ([`sensitivity`]).

pub mod error;
pub mod exogenous;
pub mod extended_estimator;
pub mod internal_model;
pub mod lti;
pub mod model_following;
pub mod numlin;
pub mod placement;
pub mod sensitivity;
pub mod sim;

pub use error::{Error, Result};
pub use numlin::{Complex, Matrix, Polynomial};
