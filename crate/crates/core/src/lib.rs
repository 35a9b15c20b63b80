//! Statistics of the field component at a probe point inside a random uniform
//! distribution of dipoles.
//!
//! Two independent routes are provided: direct Monte Carlo summation of
//! dipole fields ([`montecarlo`]) and characteristic-function analysis of the
//! single-dipole distribution and its N → ∞ limits ([`analytic`], [`limit`]).
//! [`montecarlo::compare`] cross-validates the two.

pub mod analytic;
pub mod error;
pub mod io;
pub mod kernel;
pub mod limit;
pub mod montecarlo;
mod par;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub use kernel::{OrientationMode, ReducedField};
