//! Exit laws of finite-velocity random motions.
//!
//! The telegraph process on an interval (with and without direction-dependent
//! speeds), and the orthogonal four-direction motion in a horizontal strip:
//! closed-form exit probabilities and mean exit times, Fourier transforms and
//! numerically inverted exit-point densities, Brownian reference laws, and an
//! exact event-driven Monte Carlo simulator used to cross-check all of them.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brownian;
pub mod drift;
pub mod error;
pub mod format;
pub mod interval;
pub mod linops;
pub mod mc;
pub mod model;
pub mod quadrature;
pub mod strip;

pub use error::{Error, Result};
pub use model::{
    validate_interval_start, validate_strip_start, Direction1D, Direction2D, DriftTelegraphParams,
    Interval, PlanarStripProblem, TelegraphParams,
};
