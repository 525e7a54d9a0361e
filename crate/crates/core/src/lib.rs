//! Rescaled fractional evolution equations and their analytic continuation.
//!
//! The crate evaluates `u_delta(t^(1/delta)) = sum t^n / Gamma(delta n + 1) A^n u0`,
//! whose limit as `delta -> 1+` continues the classical solution
//! `u(t) = sum t^n / n! A^n u0` to its Mittag-Leffler star.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gamma;
pub mod series;
pub mod evolution;
pub mod wright;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Library version, recorded in the metadata of every output table.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
