//! Certification of observation-time pairs for vibrating strings, beams and
//! plates, and reconstruction of initial data from position snapshots.
//!
//! Two instants `t0`, `t1` determine the initial data of a vibrating system
//! through a family of 2×2 per-mode maps. Whether the resulting inverse is
//! bounded in a given pair of Sobolev-type norms depends on how well the
//! number `(t0 - t1)/π` is approximated by rationals. This crate provides
//!
//! - [`diophantine`]: exact reals (rationals, quadratic surds, dyadic
//!   enclosures), continued fractions and nearest-integer-distance scans;
//! - [`spectral`]: the Fourier-sine modal representation of the string,
//!   loaded string, hinged beam and hinged rectangular plate;
//! - [`observability`]: per-mode observation maps and strategic-pair
//!   certificates;
//! - [`reconstruction`]: recovery of initial data from snapshots with
//!   conditioning and noise analysis;
//! - [`constructions`]: rational gaps avoiding sine zeros for the loaded
//!   string and the continued-fraction shift sequence;
//! - [`cli`]: the experiment runner behind the `strategic` binary.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constructions;
pub mod diophantine;
pub mod observability;
pub mod reconstruction;
pub mod spectral;

mod error;

pub use error::{Error, Result};
